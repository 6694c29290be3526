//! Compare the pipeline against the exhaustive optimum on instances small
//! enough to enumerate every valid partition.
//!
//! ```bash
//! cargo run --release -p smooth-anon --example oracle_check
//! ```

use smooth_anon::anonymize::{anonymize, Mode};
use smooth_anon::clustering::FacilityConfig;
use smooth_anon::hashing::{hash3, unit_f64};
use smooth_anon::matrix::SparseBinaryMatrix;
use smooth_anon::oracle::{brute_force_facility_location, brute_force_smooth_opt};

fn random_matrix(seed: u64, n: usize, m: usize, density: f64) -> SparseBinaryMatrix {
    let rows = (0..n)
        .map(|u| {
            (0..m as u32)
                .filter(|&f| unit_f64(hash3(seed, u as u64, f as u64)) < density)
                .collect()
        })
        .collect();
    SparseBinaryMatrix::from_rows(m, rows).unwrap()
}

fn main() {
    println!("{:>6} {:>9} {:>10} {:>7} {:>12}", "seed", "oracle", "pipeline", "ratio", "partitions");
    let mut ratio_sum = 0.0;
    let trials = 12u64;
    for seed in 0..trials {
        let m = random_matrix(seed, 7, 5, 0.5);
        let oracle = brute_force_smooth_opt(&m, 2).unwrap();
        let mut cfg = FacilityConfig::new(2).with_seed(seed);
        cfg.beta = 8.0;
        let report = anonymize(&m, 2, Mode::Smooth, &cfg).unwrap();
        let ratio = report.jaccard / oracle.best_jaccard;
        ratio_sum += ratio;
        println!(
            "{seed:>6} {:>9.4} {:>10.4} {:>7.3} {:>12}",
            oracle.best_jaccard, report.jaccard, ratio, oracle.enumerated
        );
    }
    println!("mean ratio over {trials} instances: {:.3}", ratio_sum / trials as f64);

    // The facility-location oracle answers a different question: the exact
    // minimum of opening costs plus assignment distances.
    let m = random_matrix(99, 8, 5, 0.5);
    let costs = vec![2.0; 8];
    let (objective, open) = brute_force_facility_location(&m, &costs).unwrap();
    println!(
        "\nexact facility location on 8 points, uniform cost 2: objective {objective}, open {open:?}"
    );
}
