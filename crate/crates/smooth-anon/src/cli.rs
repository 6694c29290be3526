//! Command implementations behind the binary: file in, file out, CSV
//! reports. The binary itself only parses flags and maps errors to exit
//! codes (0 success, 2 verification failure, 3 input error).

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::anonymize::{anonymize, AnonymizationReport, Mode};
use crate::clustering::{EnforceStrategy, FacilityConfig};
use crate::dp::{jaccard_upper_bound, randomized_response, DpMode, DpParams};
use crate::error::{Error, Result};
use crate::hashing::{hash2, hash3};
use crate::io::{load_edge_list, save_edge_list};
use crate::matrix::{diff_stats, SparseBinaryMatrix};
use crate::report::{mean_std, write_csv, SweepRow};
use crate::sbm::{generate, SbmParams};
use crate::shard::{sharded_anonymize, ShardConfig};

/// Tail probability used for the theoretical bound column of DP reports.
pub const REPORT_DELTA: f64 = 0.05;

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}

#[derive(Debug, Clone)]
pub struct GenerateSbmArgs {
    pub r: usize,
    pub s: usize,
    pub q: f64,
    pub p: f64,
    pub seed: u64,
    pub out: PathBuf,
}

/// Generate an SBM instance, save it, and print its entry count.
pub fn cmd_generate_sbm(args: &GenerateSbmArgs) -> Result<usize> {
    let params = SbmParams::new(args.r, args.s, args.q, args.p, args.seed)?;
    let m = generate(&params);
    save_edge_list(&m, &args.out)?;
    println!("{}", m.entry_count());
    Ok(m.entry_count())
}

#[derive(Debug, Clone)]
pub struct AnonymizeArgs {
    pub input: PathBuf,
    pub k: usize,
    pub mode: Mode,
    pub beta: f64,
    pub strategy: EnforceStrategy,
    pub runs: usize,
    /// Shard into chunks of this many users when set.
    pub chunk_size: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub report: Option<PathBuf>,
}

/// Run the anonymization pipeline on an edge-list file. Writes the released
/// matrix (and a one-row CSV report when requested), then fails with a
/// verification error if the release did not verify.
pub fn cmd_anonymize(args: &AnonymizeArgs) -> Result<AnonymizationReport> {
    let m = load_edge_list(&args.input)?;
    let fcfg = FacilityConfig {
        k: args.k,
        beta: args.beta,
        n_runs: args.runs,
        seed: args.seed,
        strategy: args.strategy,
    };
    let report = match args.chunk_size {
        Some(chunk_size) => {
            let scfg = ShardConfig {
                chunk_size,
                seed: args.seed,
                ..ShardConfig::default()
            };
            sharded_anonymize(&m, args.k, args.mode, &fcfg, &scfg)?
        }
        None => anonymize(&m, args.k, args.mode, &fcfg)?,
    };
    save_edge_list(&report.output, &args.out)?;
    if let Some(path) = &args.report {
        let row = SweepRow {
            dataset: dataset_label(&args.input),
            algorithm: args.mode.label().into(),
            param: args.k as f64,
            jaccard_mean: report.jaccard,
            jaccard_std: 0.0,
            suppressed_frac: report.suppressed_frac,
            created_frac: report.created_frac,
            runtime_ms: report.wall_time.as_secs_f64() * 1e3,
        };
        write_csv(std::slice::from_ref(&row), path)?;
    }
    if !report.verified {
        return Err(Error::VerificationFailed(format!(
            "{} release of {} did not verify for k = {}",
            args.mode.label(),
            args.input.display(),
            args.k
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DpArgs {
    pub input: PathBuf,
    pub epsilon: f64,
    pub mode: DpMode,
    pub seed: u64,
    pub out: PathBuf,
    pub report: Option<PathBuf>,
}

/// Apply randomized response to an edge-list file. The report holds the
/// empirical row plus, when the bound applies, a second row carrying the
/// theoretical Jaccard cap in the `jaccard_mean` column.
pub fn cmd_dp(args: &DpArgs) -> Result<AnonymizationReport> {
    let m = load_edge_list(&args.input)?;
    let start = Instant::now();
    let params = match args.mode {
        DpMode::Edge => DpParams::edge(args.epsilon, args.seed)?,
        DpMode::Node => DpParams::node(args.epsilon, m.n_features(), args.seed)?,
    };
    let out = randomized_response(&m, &params);
    save_edge_list(&out, &args.out)?;
    let stats = diff_stats(&m, &out)?;
    let entries = m.entry_count() as u64;
    let (suppressed_frac, created_frac) = if entries == 0 {
        (0.0, 0.0)
    } else {
        stats.suppressed_created_fractions(entries)?
    };
    let elapsed = start.elapsed();
    let algorithm = match args.mode {
        DpMode::Edge => "dp-edge",
        DpMode::Node => "dp-node",
    };
    if let Some(path) = &args.report {
        let mut rows = vec![SweepRow {
            dataset: dataset_label(&args.input),
            algorithm: algorithm.into(),
            param: args.epsilon,
            jaccard_mean: stats.jaccard(),
            jaccard_std: 0.0,
            suppressed_frac,
            created_frac,
            runtime_ms: elapsed.as_secs_f64() * 1e3,
        }];
        // The closed-form cap is a function of the flip probability, so node
        // mode evaluates it at the edge-equivalent epsilon / m.
        let bound_epsilon = match args.mode {
            DpMode::Edge => args.epsilon,
            DpMode::Node => args.epsilon / m.n_features() as f64,
        };
        let cells = m.n_users() as u64 * m.n_features() as u64;
        if m.density() > 0.0 {
            if let Ok(bound) = jaccard_upper_bound(bound_epsilon, m.density(), cells, REPORT_DELTA)
            {
                rows.push(SweepRow {
                    dataset: dataset_label(&args.input),
                    algorithm: format!("{algorithm}-bound"),
                    param: args.epsilon,
                    jaccard_mean: bound,
                    jaccard_std: 0.0,
                    suppressed_frac: 0.0,
                    created_frac: 0.0,
                    runtime_ms: 0.0,
                });
            }
        }
        write_csv(&rows, path)?;
    }
    Ok(AnonymizationReport {
        output: out,
        k: 0,
        mode: Mode::Smooth,
        jaccard: stats.jaccard(),
        suppressed_frac,
        created_frac,
        verified: true,
        cluster_count: 0,
        wall_time: elapsed,
    })
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub input: PathBuf,
    pub k_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub csv_out: Option<PathBuf>,
}

/// One aggregated row per (algorithm, parameter): both rounding modes per k
/// and edge-DP per epsilon, metrics averaged over `repeats` seeded runs.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    if args.k_list.is_empty() && args.eps_list.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one k or epsilon".into(),
        ));
    }
    if args.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let m = load_edge_list(&args.input)?;
    let dataset = dataset_label(&args.input);
    let mut rows = Vec::new();
    for (tag, mode) in [(0u64, Mode::Smooth), (1u64, Mode::Suppress)] {
        for (ki, &k) in args.k_list.iter().enumerate() {
            let mut jaccards = Vec::new();
            let mut suppressed = Vec::new();
            let mut created = Vec::new();
            let mut runtime = Vec::new();
            for rep in 0..args.repeats {
                let seed = hash3(hash2(args.seed, tag), ki as u64, rep as u64);
                let cfg = FacilityConfig::new(k).with_seed(seed);
                let report = anonymize(&m, k, mode, &cfg)?;
                jaccards.push(report.jaccard);
                suppressed.push(report.suppressed_frac);
                created.push(report.created_frac);
                runtime.push(report.wall_time.as_secs_f64() * 1e3);
            }
            let (jaccard_mean, jaccard_std) = mean_std(&jaccards);
            rows.push(SweepRow {
                dataset: dataset.clone(),
                algorithm: mode.label().into(),
                param: k as f64,
                jaccard_mean,
                jaccard_std,
                suppressed_frac: mean_std(&suppressed).0,
                created_frac: mean_std(&created).0,
                runtime_ms: mean_std(&runtime).0,
            });
        }
    }
    for (ei, &epsilon) in args.eps_list.iter().enumerate() {
        let mut jaccards = Vec::new();
        let mut suppressed = Vec::new();
        let mut created = Vec::new();
        let mut runtime = Vec::new();
        for rep in 0..args.repeats {
            let seed = hash3(hash2(args.seed, 2), ei as u64, rep as u64);
            let start = Instant::now();
            let out = randomized_response(&m, &DpParams::edge(epsilon, seed)?);
            runtime.push(start.elapsed().as_secs_f64() * 1e3);
            let stats = diff_stats(&m, &out)?;
            jaccards.push(stats.jaccard());
            let entries = m.entry_count() as u64;
            let (s, c) = if entries == 0 {
                (0.0, 0.0)
            } else {
                stats.suppressed_created_fractions(entries)?
            };
            suppressed.push(s);
            created.push(c);
        }
        let (jaccard_mean, jaccard_std) = mean_std(&jaccards);
        rows.push(SweepRow {
            dataset: dataset.clone(),
            algorithm: "dp-edge".into(),
            param: epsilon,
            jaccard_mean,
            jaccard_std,
            suppressed_frac: mean_std(&suppressed).0,
            created_frac: mean_std(&created).0,
            runtime_ms: mean_std(&runtime).0,
        });
    }
    if let Some(path) = &args.csv_out {
        write_csv(&rows, path)?;
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct KVsEpsArgs {
    pub input: PathBuf,
    pub k_list: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub csv_out: Option<PathBuf>,
}

/// One matched pair per k.
#[derive(Debug, Clone, PartialEq)]
pub struct KVsEpsRow {
    pub k: usize,
    /// Edge-DP epsilon whose empirical Jaccard matches the smooth release's,
    /// within 0.01; `None` means no epsilon at or below 100 reaches it.
    pub epsilon: Option<f64>,
    pub smooth_jaccard: f64,
}

/// For each k: measure the smooth release's mean Jaccard, then bisect over
/// edge-DP epsilon until the mechanism's mean empirical Jaccard matches it
/// within 0.01.
pub fn cmd_k_vs_eps(args: &KVsEpsArgs) -> Result<Vec<KVsEpsRow>> {
    if args.k_list.is_empty() {
        return Err(Error::InvalidParameter("k list is empty".into()));
    }
    if args.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let m = load_edge_list(&args.input)?;
    let mut rows = Vec::new();
    for (ki, &k) in args.k_list.iter().enumerate() {
        let mut jaccards = Vec::new();
        for rep in 0..args.repeats {
            let seed = hash3(hash2(args.seed, 0), ki as u64, rep as u64);
            let cfg = FacilityConfig::new(k).with_seed(seed);
            jaccards.push(anonymize(&m, k, Mode::Smooth, &cfg)?.jaccard);
        }
        let target = mean_std(&jaccards).0;
        let epsilon = match_epsilon(&m, target, args.repeats, hash3(args.seed, 3, ki as u64))?;
        rows.push(KVsEpsRow {
            k,
            epsilon,
            smooth_jaccard: target,
        });
    }
    if let Some(path) = &args.csv_out {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "k,epsilon")?;
        for row in &rows {
            match row.epsilon {
                Some(eps) => writeln!(w, "{},{eps}", row.k)?,
                None => writeln!(w, "{},>=100", row.k)?,
            }
        }
        w.flush()?;
    }
    Ok(rows)
}

const MATCH_TOLERANCE: f64 = 0.01;

fn mean_dp_jaccard(
    m: &SparseBinaryMatrix,
    epsilon: f64,
    repeats: usize,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for rep in 0..repeats {
        let out = randomized_response(m, &DpParams::edge(epsilon, hash2(seed, rep as u64))?);
        total += diff_stats(m, &out)?.jaccard();
    }
    Ok(total / repeats as f64)
}

/// Empirical bisection over epsilon in [0, 100]; `None` when even 100 falls
/// short of the target. A Jaccard of 1.0 can only be approached, never
/// guaranteed, so it always maps to the sentinel.
fn match_epsilon(
    m: &SparseBinaryMatrix,
    target: f64,
    repeats: usize,
    seed: u64,
) -> Result<Option<f64>> {
    if target >= 1.0 {
        return Ok(None);
    }
    let mut step = 0u64;
    let eval = |eps: f64, step: u64| mean_dp_jaccard(m, eps, repeats, hash2(seed, step));
    let at_max = eval(crate::dp::MAX_EPSILON, step)?;
    if at_max < target - MATCH_TOLERANCE {
        return Ok(None);
    }
    let at_zero = eval(0.0, 1)?;
    if at_zero >= target {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0f64, crate::dp::MAX_EPSILON);
    for _ in 0..60 {
        step += 2;
        let mid = 0.5 * (lo + hi);
        let j = eval(mid, step)?;
        if (j - target).abs() <= MATCH_TOLERANCE {
            return Ok(Some(mid));
        }
        if j < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-3 {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub input: PathBuf,
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleComparison {
    pub oracle_jaccard: f64,
    pub pipeline_jaccard: f64,
    /// `pipeline / oracle`; 1 when both are perfect on an empty-vs-empty
    /// comparison.
    pub ratio: f64,
}

/// Run the exhaustive optimum and the pipeline on a tiny instance and print
/// both Jaccards plus their ratio.
pub fn cmd_oracle(args: &OracleArgs) -> Result<OracleComparison> {
    let m = load_edge_list(&args.input)?;
    let oracle = crate::oracle::brute_force_smooth_opt(&m, args.k)?;
    let cfg = FacilityConfig::new(args.k).with_seed(args.seed);
    let pipeline = anonymize(&m, args.k, Mode::Smooth, &cfg)?;
    let ratio = if oracle.best_jaccard > 0.0 {
        pipeline.jaccard / oracle.best_jaccard
    } else {
        1.0
    };
    println!("oracle jaccard: {:.6}", oracle.best_jaccard);
    println!("pipeline jaccard: {:.6}", pipeline.jaccard);
    println!("ratio: {ratio:.6}");
    Ok(OracleComparison {
        oracle_jaccard: oracle.best_jaccard,
        pipeline_jaccard: pipeline.jaccard,
        ratio,
    })
}
