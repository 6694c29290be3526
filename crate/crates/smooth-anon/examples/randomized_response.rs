//! Release a matrix with randomized response at several privacy levels and
//! compare the measured Jaccard similarity with its closed-form cap.
//!
//! ```bash
//! cargo run --release -p smooth-anon --example randomized_response
//! ```

use smooth_anon::dp::{jaccard_upper_bound, randomized_response, DpParams};
use smooth_anon::matrix::diff_stats;
use smooth_anon::sbm::{generate, SbmParams};

fn main() {
    let m = generate(&SbmParams::new(16, 64, 0.8, 0.01, 5).unwrap());
    let cells = (m.n_users() * m.n_features()) as u64;
    println!(
        "input: {} entries over {cells} cells (density {:.4})\n",
        m.entry_count(),
        m.density()
    );

    println!(
        "{:>7} {:>9} {:>10} {:>10} {:>10}",
        "epsilon", "flip_p", "jaccard", "bound", "created"
    );
    for epsilon in [0.5, 1.0, 2.0, 4.0, 8.0, 12.0] {
        let params = DpParams::edge(epsilon, 99).unwrap();
        let out = randomized_response(&m, &params);
        let stats = diff_stats(&m, &out).unwrap();
        let bound = jaccard_upper_bound(epsilon, m.density(), cells, 0.05)
            .map(|b| format!("{b:.4}"))
            .unwrap_or_else(|_| "n/a".into());
        println!(
            "{epsilon:>7} {:>9.4} {:>10.4} {:>10} {:>10}",
            params.flip_p,
            stats.jaccard(),
            bound,
            stats.created
        );
    }

    // Node-level privacy rescales epsilon by the feature count, so any
    // usable epsilon flips almost every cell.
    let node = DpParams::node(10.0, m.n_features(), 99).unwrap();
    let out = randomized_response(&m, &node);
    println!(
        "\nnode privacy at epsilon 10: flip_p {:.6}, jaccard {:.4} (near-random output)",
        node.flip_p,
        diff_stats(&m, &out).unwrap().jaccard()
    );
}
