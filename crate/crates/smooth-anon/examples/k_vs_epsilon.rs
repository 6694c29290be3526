//! Put anonymity and differential privacy on the same utility axis: for
//! each k, find the edge-DP epsilon whose empirical Jaccard matches the
//! smooth release's, then sweep both families into a CSV.
//!
//! ```bash
//! cargo run --release -p smooth-anon --example k_vs_epsilon
//! ```

use smooth_anon::cli::{cmd_generate_sbm, cmd_k_vs_eps, cmd_sweep, GenerateSbmArgs, KVsEpsArgs, SweepArgs};

fn main() {
    let dir = std::env::temp_dir().join("smooth_anon_k_vs_eps");
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("stochastic.tsv");
    cmd_generate_sbm(&GenerateSbmArgs {
        r: 8,
        s: 32,
        q: 0.8,
        p: 0.01,
        seed: 4,
        out: input.clone(),
    })
    .unwrap();

    println!("matching edge-DP epsilon to each k's smooth Jaccard:\n");
    let rows = cmd_k_vs_eps(&KVsEpsArgs {
        input: input.clone(),
        k_list: vec![2, 4, 8, 16],
        repeats: 3,
        seed: 4,
        csv_out: Some(dir.join("k_vs_eps.csv")),
    })
    .unwrap();
    println!("{:>4} {:>16} {:>16}", "k", "smooth jaccard", "matching eps");
    for row in &rows {
        match row.epsilon {
            Some(eps) => println!("{:>4} {:>16.4} {:>16.2}", row.k, row.smooth_jaccard, eps),
            None => println!("{:>4} {:>16.4} {:>16}", row.k, row.smooth_jaccard, ">=100"),
        }
    }

    let sweep_csv = dir.join("sweep.csv");
    cmd_sweep(&SweepArgs {
        input,
        k_list: vec![2, 4, 8, 16],
        eps_list: vec![1.0, 2.0, 4.0],
        repeats: 5,
        seed: 4,
        csv_out: Some(sweep_csv.clone()),
    })
    .unwrap();
    println!(
        "\nfull sweep written to {} and {}",
        sweep_csv.display(),
        dir.join("k_vs_eps.csv").display()
    );
    println!(
        "\neven a strong anonymity level like k = 16 corresponds to an epsilon
far beyond what differential privacy practitioners would consider
protective on sparse data."
    );
}
