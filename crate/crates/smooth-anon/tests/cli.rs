//! End-to-end tests of the command layer and the binary: file round trips,
//! seed determinism, report formats, exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use smooth_anon::cli::{
    cmd_anonymize, cmd_dp, cmd_generate_sbm, cmd_k_vs_eps, cmd_oracle, cmd_sweep, AnonymizeArgs,
    DpArgs, GenerateSbmArgs, KVsEpsArgs, OracleArgs, SweepArgs,
};
use smooth_anon::clustering::EnforceStrategy;
use smooth_anon::dp::DpMode;
use smooth_anon::io::{load_edge_list, save_edge_list};
use smooth_anon::matrix::SparseBinaryMatrix;
use smooth_anon::report::CSV_HEADER;
use smooth_anon::sbm::{generate, SbmParams};
use smooth_anon::Mode;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smooth-anon"))
}

fn gen_args(dir: &Path, r: usize, s: usize, q: f64, p: f64, seed: u64) -> GenerateSbmArgs {
    GenerateSbmArgs {
        r,
        s,
        q,
        p,
        seed,
        out: dir.join(format!("sbm_{r}x{s}_{seed}.tsv")),
    }
}

fn anon_args(input: PathBuf, k: usize, mode: Mode, out: PathBuf) -> AnonymizeArgs {
    AnonymizeArgs {
        input,
        k,
        mode,
        beta: 2.0,
        strategy: EnforceStrategy::Simple,
        runs: 10,
        chunk_size: None,
        seed: 0,
        out,
        report: None,
    }
}

#[test]
fn generate_sbm_writes_expected_entry_counts() {
    let dir = tempfile::tempdir().unwrap();
    // Paper-scale instance: body line count within 4 sigma of 62,259.
    let args = gen_args(dir.path(), 16, 64, 0.8, 0.01, 3);
    let entries = cmd_generate_sbm(&args).unwrap();
    assert!(
        (entries as f64 - 62_259.2).abs() < 4.0 * 240.0,
        "entry count {entries}"
    );
    let text = std::fs::read_to_string(&args.out).unwrap();
    assert_eq!(text.lines().count(), entries + 1);
    assert!(text.starts_with("1024 1024\n"));

    // Complete blocks: exactly r * s^2 lines.
    let exact = gen_args(dir.path(), 4, 8, 1.0, 0.0, 5);
    assert_eq!(cmd_generate_sbm(&exact).unwrap(), 4 * 8 * 8);

    // Same seed, same bytes.
    let again = GenerateSbmArgs {
        out: dir.path().join("again.tsv"),
        ..args.clone()
    };
    cmd_generate_sbm(&again).unwrap();
    assert_eq!(
        std::fs::read(&args.out).unwrap(),
        std::fs::read(&again.out).unwrap()
    );
}

#[test]
fn anonymize_k1_round_trips_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let m = generate(&SbmParams::new(4, 16, 0.7, 0.05, 11).unwrap());
    save_edge_list(&m, &input).unwrap();
    let out = dir.path().join("out.tsv");
    let report = cmd_anonymize(&anon_args(input, 1, Mode::Smooth, out.clone())).unwrap();
    assert_eq!(report.jaccard, 1.0);
    assert_eq!(load_edge_list(&out).unwrap(), m);
}

#[test]
fn anonymize_paper_instance_reports_expected_quality() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 16, 64, 0.8, 0.01, 42);
    cmd_generate_sbm(&gen).unwrap();
    let report_path = dir.path().join("report.csv");
    let mut args = anon_args(
        gen.out.clone(),
        8,
        Mode::Smooth,
        dir.path().join("anon.tsv"),
    );
    args.report = Some(report_path.clone());
    let report = cmd_anonymize(&args).unwrap();
    assert!(
        report.jaccard >= 0.55 && report.jaccard <= 0.80,
        "jaccard {}",
        report.jaccard
    );
    let csv = std::fs::read_to_string(&report_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let row = lines.next().unwrap();
    assert!(row.starts_with("sbm_16x64_42,smooth,8,"), "row {row}");

    // Suppression reports zero created entries.
    let mut sup = anon_args(
        gen.out.clone(),
        8,
        Mode::Suppress,
        dir.path().join("sup.tsv"),
    );
    sup.report = Some(dir.path().join("sup.csv"));
    let sup_report = cmd_anonymize(&sup).unwrap();
    assert_eq!(sup_report.created_frac, 0.0);
    let csv = std::fs::read_to_string(dir.path().join("sup.csv")).unwrap();
    let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[1], "suppress");
    assert_eq!(fields[6], "0");
}

#[test]
fn anonymize_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 8, 16, 0.8, 0.02, 9);
    cmd_generate_sbm(&gen).unwrap();
    let mut a = anon_args(gen.out.clone(), 4, Mode::Smooth, dir.path().join("a.tsv"));
    a.seed = 31;
    let mut b = anon_args(gen.out.clone(), 4, Mode::Smooth, dir.path().join("b.tsv"));
    b.seed = 31;
    cmd_anonymize(&a).unwrap();
    cmd_anonymize(&b).unwrap();
    assert_eq!(
        std::fs::read(dir.path().join("a.tsv")).unwrap(),
        std::fs::read(dir.path().join("b.tsv")).unwrap()
    );
    // Sharded runs honor the seed the same way.
    a.chunk_size = Some(64);
    a.out = dir.path().join("ac.tsv");
    b.chunk_size = Some(64);
    b.out = dir.path().join("bc.tsv");
    cmd_anonymize(&a).unwrap();
    cmd_anonymize(&b).unwrap();
    assert_eq!(
        std::fs::read(dir.path().join("ac.tsv")).unwrap(),
        std::fs::read(dir.path().join("bc.tsv")).unwrap()
    );
}

#[test]
fn dp_command_reports_bound_above_empirical() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 8, 32, 0.8, 0.01, 2);
    cmd_generate_sbm(&gen).unwrap();

    // Large epsilon keeps nearly everything.
    let quiet = cmd_dp(&DpArgs {
        input: gen.out.clone(),
        epsilon: 20.0,
        mode: DpMode::Edge,
        seed: 4,
        out: dir.path().join("dp20.tsv"),
        report: None,
    })
    .unwrap();
    assert!(quiet.jaccard > 0.99, "jaccard {}", quiet.jaccard);

    // Moderate epsilon: empirical row stays below the bound row.
    let report_path = dir.path().join("dp.csv");
    cmd_dp(&DpArgs {
        input: gen.out.clone(),
        epsilon: 2.0,
        mode: DpMode::Edge,
        seed: 4,
        out: dir.path().join("dp2.tsv"),
        report: Some(report_path.clone()),
    })
    .unwrap();
    let csv = std::fs::read_to_string(&report_path).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "dp-edge");
    assert_eq!(rows[1][1], "dp-edge-bound");
    let empirical: f64 = rows[0][3].parse().unwrap();
    let bound: f64 = rows[1][3].parse().unwrap();
    assert!(empirical <= bound, "empirical {empirical} above bound {bound}");
}

#[test]
fn dp_node_mode_washes_out_sparse_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 16, 64, 0.8, 0.01, 8);
    cmd_generate_sbm(&gen).unwrap();
    let report = cmd_dp(&DpArgs {
        input: gen.out.clone(),
        epsilon: 1.0,
        mode: DpMode::Node,
        seed: 6,
        out: dir.path().join("node.tsv"),
        report: None,
    })
    .unwrap();
    assert!(report.jaccard < 0.1, "jaccard {}", report.jaccard);
}

#[test]
fn sweep_trends_match_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 8, 32, 0.8, 0.01, 17);
    cmd_generate_sbm(&gen).unwrap();
    let csv_out = dir.path().join("sweep.csv");
    let rows = cmd_sweep(&SweepArgs {
        input: gen.out.clone(),
        k_list: vec![2, 4, 8, 16, 32],
        eps_list: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        repeats: 3,
        seed: 5,
        csv_out: Some(csv_out.clone()),
    })
    .unwrap();

    // Smooth quality does not improve as k grows (up to noise slack).
    let smooth: Vec<f64> = rows
        .iter()
        .filter(|r| r.algorithm == "smooth")
        .map(|r| r.jaccard_mean)
        .collect();
    assert_eq!(smooth.len(), 5);
    for w in smooth.windows(2) {
        assert!(
            w[1] <= w[0] + 0.05,
            "smooth jaccard rose from {} to {}",
            w[0],
            w[1]
        );
    }

    // Randomized-response quality rises with epsilon.
    let dp: Vec<f64> = rows
        .iter()
        .filter(|r| r.algorithm == "dp-edge")
        .map(|r| r.jaccard_mean)
        .collect();
    assert_eq!(dp.len(), 5);
    for w in dp.windows(2) {
        assert!(w[1] > w[0], "dp jaccard fell from {} to {}", w[0], w[1]);
    }

    let csv = std::fs::read_to_string(&csv_out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(csv.lines().count(), 1 + rows.len());
}

#[test]
fn sweep_std_is_concentrated_on_paper_instance() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 16, 64, 0.8, 0.01, 23);
    cmd_generate_sbm(&gen).unwrap();
    let rows = cmd_sweep(&SweepArgs {
        input: gen.out.clone(),
        k_list: vec![8],
        eps_list: vec![],
        repeats: 10,
        seed: 1,
        csv_out: None,
    })
    .unwrap();
    let smooth = rows.iter().find(|r| r.algorithm == "smooth").unwrap();
    assert!(
        smooth.jaccard_std <= 0.02,
        "smooth jaccard std {}",
        smooth.jaccard_std
    );
}

#[test]
fn k_vs_eps_matches_and_saturates() {
    let dir = tempfile::tempdir().unwrap();
    let gen = gen_args(dir.path(), 8, 32, 0.8, 0.01, 29);
    cmd_generate_sbm(&gen).unwrap();
    let csv_out = dir.path().join("kve.csv");
    let rows = cmd_k_vs_eps(&KVsEpsArgs {
        input: gen.out.clone(),
        k_list: vec![4],
        repeats: 3,
        seed: 2,
        csv_out: Some(csv_out.clone()),
    })
    .unwrap();
    let eps = rows[0].epsilon.expect("matchable target");
    assert!(eps > 0.0 && eps < 100.0);
    let csv = std::fs::read_to_string(&csv_out).unwrap();
    assert!(csv.starts_with("k,epsilon\n4,"));

    // A perfectly anonymous input (all rows identical) has smooth Jaccard 1,
    // which randomized response can only approach: sentinel.
    let perfect = dir.path().join("identical.tsv");
    let m = SparseBinaryMatrix::from_rows(6, vec![vec![1, 3]; 12]).unwrap();
    save_edge_list(&m, &perfect).unwrap();
    let rows = cmd_k_vs_eps(&KVsEpsArgs {
        input: perfect,
        k_list: vec![4],
        repeats: 2,
        seed: 2,
        csv_out: Some(csv_out.clone()),
    })
    .unwrap();
    assert_eq!(rows[0].epsilon, None);
    assert_eq!(rows[0].smooth_jaccard, 1.0);
    let csv = std::fs::read_to_string(&csv_out).unwrap();
    assert!(csv.contains("4,>=100"), "csv {csv}");
}

#[test]
fn randomized_response_favors_denser_inputs_at_parity_of_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let dense = gen_args(dir.path(), 4, 16, 0.9, 0.3, 31);
    let sparse = gen_args(dir.path(), 4, 16, 0.9, 0.02, 32);
    cmd_generate_sbm(&dense).unwrap();
    cmd_generate_sbm(&sparse).unwrap();
    let run = |input: PathBuf| {
        cmd_sweep(&SweepArgs {
            input,
            k_list: vec![],
            eps_list: vec![1.0, 2.0, 4.0],
            repeats: 5,
            seed: 6,
            csv_out: None,
        })
        .unwrap()
    };
    let dense_rows = run(dense.out.clone());
    let sparse_rows = run(sparse.out.clone());
    for (d, s) in dense_rows.iter().zip(&sparse_rows) {
        assert_eq!(d.param, s.param);
        assert!(
            d.jaccard_mean > s.jaccard_mean,
            "eps {}: dense {} not above sparse {}",
            d.param,
            d.jaccard_mean,
            s.jaccard_mean
        );
    }
}

#[test]
fn oracle_command_compares_pipeline_to_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let identical = dir.path().join("same.tsv");
    let m = SparseBinaryMatrix::from_rows(4, vec![vec![0, 2]; 6]).unwrap();
    save_edge_list(&m, &identical).unwrap();
    let cmp = cmd_oracle(&OracleArgs {
        input: identical,
        k: 2,
        seed: 0,
    })
    .unwrap();
    assert_eq!(cmp.ratio, 1.0);

    let random = dir.path().join("random.tsv");
    let m = generate(&SbmParams::new(2, 3, 0.7, 0.2, 44).unwrap());
    save_edge_list(&m, &random).unwrap();
    let cmp = cmd_oracle(&OracleArgs {
        input: random,
        k: 2,
        seed: 0,
    })
    .unwrap();
    assert!(cmp.ratio > 0.0 && cmp.ratio <= 1.0, "ratio {}", cmp.ratio);

    let big = dir.path().join("big.tsv");
    save_edge_list(&generate(&SbmParams::new(4, 8, 0.5, 0.1, 2).unwrap()), &big).unwrap();
    assert!(cmd_oracle(&OracleArgs {
        input: big,
        k: 2,
        seed: 0,
    })
    .is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Input errors exit 3.
    let missing = bin()
        .args(["oracle", "-i", "/nonexistent.tsv", "-k", "2"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let malformed_path = dir.path().join("bad.tsv");
    std::fs::write(&malformed_path, "2 2\n0 1\n").unwrap();
    let malformed = bin()
        .args(["anonymize", "-k", "1", "--out", "/dev/null", "-i"])
        .arg(&malformed_path)
        .output()
        .unwrap();
    assert_eq!(malformed.status.code(), Some(3));

    // k above the population is an input error too.
    let small = dir.path().join("small.tsv");
    std::fs::write(&small, "2 2\n0\t1\n").unwrap();
    let too_big = bin()
        .args(["anonymize", "-k", "5", "--out", "/dev/null", "-i"])
        .arg(&small)
        .output()
        .unwrap();
    assert_eq!(too_big.status.code(), Some(3));

    // Unknown flags are input errors; help is a success.
    let unknown = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(3));
    let help = bin().args(["--help"]).output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn binary_generate_then_anonymize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let sbm = dir.path().join("sbm.tsv");
    let status = bin()
        .args(["generate-sbm", "--r", "4", "--s", "8", "--q", "0.9", "--p", "0.02"])
        .args(["--seed", "7", "--out"])
        .arg(&sbm)
        .status()
        .unwrap();
    assert!(status.success());
    let out = dir.path().join("anon.tsv");
    let report = dir.path().join("report.csv");
    let status = bin()
        .args(["anonymize", "-k", "4", "--seed", "1", "-i"])
        .arg(&sbm)
        .arg("--out")
        .arg(&out)
        .arg("--report")
        .arg(&report)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let released = load_edge_list(&out).unwrap();
    assert!(smooth_anon::matrix::verify_k_anonymous(&released, 4));
    assert!(std::fs::read_to_string(&report)
        .unwrap()
        .starts_with(CSV_HEADER));
}
