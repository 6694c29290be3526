//! Run the full anonymization pipeline in both modes and compare what each
//! release keeps: smooth rounding (majority vote per cluster, may add
//! entries) against suppression (intersection per cluster, only deletes).
//!
//! ```bash
//! cargo run --release -p smooth-anon --example anonymize_pipeline
//! ```

use smooth_anon::anonymize::{anonymize, Mode};
use smooth_anon::clustering::FacilityConfig;
use smooth_anon::matrix::{equivalence_classes, verify_k_anonymous};
use smooth_anon::sbm::{generate, SbmParams};

fn main() {
    let m = generate(&SbmParams::new(16, 64, 0.8, 0.01, 1).unwrap());
    let k = 8;
    println!(
        "input: {} users, {} entries; releasing with k = {k}\n",
        m.n_users(),
        m.entry_count()
    );

    println!("{:<10} {:>9} {:>12} {:>10} {:>9} {:>9}", "mode", "jaccard", "suppressed", "created", "clusters", "time");
    for mode in [Mode::Smooth, Mode::Suppress] {
        let cfg = FacilityConfig::new(k).with_seed(1);
        let report = anonymize(&m, k, mode, &cfg).unwrap();
        assert!(report.verified);
        println!(
            "{:<10} {:>8.1}% {:>11.1}% {:>9.1}% {:>9} {:>8.0?}",
            mode.label(),
            100.0 * report.jaccard,
            100.0 * report.suppressed_frac,
            100.0 * report.created_frac,
            report.cluster_count,
            report.wall_time
        );

        let classes = equivalence_classes(&report.output);
        let smallest = classes.class_sizes.iter().min().unwrap();
        assert!(verify_k_anonymous(&report.output, k));
        println!(
            "{:<10} every released row shared by >= {smallest} users across {} classes",
            "", classes.n_classes()
        );
    }

    println!(
        "\nsmooth rounding trades a few created entries for far fewer
suppressions, which is why it keeps most of the matrix while plain
suppression collapses noisy blocks to near-empty intersections."
    );
}
