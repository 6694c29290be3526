//! How much privacy budget does a target utility cost? Tabulate the
//! smallest epsilon whose Jaccard cap reaches a target, as a function of
//! matrix density, plus the structural floor no edge-DP mechanism can beat.
//!
//! ```bash
//! cargo run --release -p smooth-anon --example epsilon_for_jaccard
//! ```

use smooth_anon::dp::{epsilon_lower_bound, min_epsilon_for_jaccard};

fn main() {
    let cells = 10u64.pow(10);
    let delta = 0.01;

    println!("smallest epsilon reaching a Jaccard cap (cells = 1e10, delta = 0.01):\n");
    print!("{:>10}", "density");
    let targets = [0.25, 0.5, 0.75, 0.9];
    for t in targets {
        print!("  J>={t:<5}");
    }
    println!();
    for exp in 1..=5 {
        let density = 10f64.powi(-exp);
        print!("{density:>10.0e}");
        for target in targets {
            match min_epsilon_for_jaccard(target, density, cells, delta).unwrap() {
                Some(eps) => print!("  {eps:>7.2}"),
                None => print!("  {:>7}", ">=100"),
            }
        }
        println!();
    }

    println!(
        "\nat density 1e-4, Jaccard above one half already needs epsilon {:.2}",
        min_epsilon_for_jaccard(0.5, 1e-4, cells, delta)
            .unwrap()
            .unwrap()
    );

    // The floor below applies to every edge-DP mechanism, not just
    // randomized response; it becomes binding at web scale.
    println!("\nfloor for any mechanism keeping expected Jaccard >= 0.9:");
    for (n, m) in [
        (10_000_000u64, 100_000u64),
        (100_000_000, 100_000),
        (1_000_000_000, 1_000_000),
    ] {
        println!(
            "  {n:>13} x {m:<9}: epsilon >= {:.2}",
            epsilon_lower_bound(0.9, n, m)
        );
    }
}
