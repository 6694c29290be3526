//! Thin command-line wrapper over the library's command layer.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smooth_anon::anonymize::Mode;
use smooth_anon::cli::{
    cmd_anonymize, cmd_dp, cmd_generate_sbm, cmd_k_vs_eps, cmd_oracle, cmd_sweep, AnonymizeArgs,
    DpArgs, GenerateSbmArgs, KVsEpsArgs, OracleArgs, SweepArgs,
};
use smooth_anon::clustering::EnforceStrategy;
use smooth_anon::dp::DpMode;
use smooth_anon::Error;

#[derive(Parser)]
#[command(
    name = "smooth-anon",
    version,
    about = "Privacy-preserving releases of sparse binary matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bipartite stochastic block model instance
    GenerateSbm {
        /// Number of blocks
        #[arg(long)]
        r: usize,
        /// Block size
        #[arg(long)]
        s: usize,
        /// In-block edge probability
        #[arg(long)]
        q: f64,
        /// Cross-block edge probability
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output edge-list path
        #[arg(long)]
        out: PathBuf,
    },
    /// Release a k-anonymous version of a matrix
    Anonymize {
        /// Input edge-list path
        #[arg(long, short)]
        input: PathBuf,
        /// Minimum anonymity class size
        #[arg(long, short)]
        k: usize,
        /// smooth (majority rounding) or suppress (intersection)
        #[arg(long, default_value = "smooth")]
        mode: Mode,
        /// Opening-cost neighborhood multiplier
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Cluster size enforcement: simple or merge
        #[arg(long, default_value = "simple")]
        strategy: EnforceStrategy,
        /// Number of clustering passes; the cheapest wins
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Shard into chunks of this many users (sharding off when absent)
        #[arg(long)]
        chunk_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output edge-list path
        #[arg(long)]
        out: PathBuf,
        /// Optional one-row CSV report path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Release a randomized-response version of a matrix
    Dp {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        epsilon: f64,
        /// edge or node differential privacy
        #[arg(long, default_value = "edge")]
        mode: DpMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV report (empirical row plus bound row when valid)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Aggregate metrics over parameter lists into a CSV
    Sweep {
        #[arg(long, short)]
        input: PathBuf,
        /// Anonymity sizes, e.g. 2,4,8,16
        #[arg(long, value_delimiter = ',')]
        k_list: Vec<usize>,
        /// Edge-DP epsilons, e.g. 0.5,1,2,4
        #[arg(long, value_delimiter = ',')]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Find the edge-DP epsilon matching each k's smooth Jaccard
    KVsEps {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Compare the pipeline against the exhaustive optimum (tiny inputs)
    Oracle {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(command: Command) -> smooth_anon::Result<()> {
    match command {
        Command::GenerateSbm {
            r,
            s,
            q,
            p,
            seed,
            out,
        } => {
            cmd_generate_sbm(&GenerateSbmArgs {
                r,
                s,
                q,
                p,
                seed,
                out,
            })?;
        }
        Command::Anonymize {
            input,
            k,
            mode,
            beta,
            strategy,
            runs,
            chunk_size,
            seed,
            out,
            report,
        } => {
            let report = cmd_anonymize(&AnonymizeArgs {
                input,
                k,
                mode,
                beta,
                strategy,
                runs,
                chunk_size,
                seed,
                out,
                report,
            })?;
            println!(
                "jaccard {:.6} suppressed {:.6} created {:.6} clusters {} verified {}",
                report.jaccard,
                report.suppressed_frac,
                report.created_frac,
                report.cluster_count,
                report.verified
            );
        }
        Command::Dp {
            input,
            epsilon,
            mode,
            seed,
            out,
            report,
        } => {
            let report = cmd_dp(&DpArgs {
                input,
                epsilon,
                mode,
                seed,
                out,
                report,
            })?;
            println!(
                "jaccard {:.6} suppressed {:.6} created {:.6}",
                report.jaccard, report.suppressed_frac, report.created_frac
            );
        }
        Command::Sweep {
            input,
            k_list,
            eps_list,
            repeats,
            seed,
            csv_out,
        } => {
            let rows = cmd_sweep(&SweepArgs {
                input,
                k_list,
                eps_list,
                repeats,
                seed,
                csv_out,
            })?;
            for row in rows {
                println!("{}", row.to_csv());
            }
        }
        Command::KVsEps {
            input,
            k_list,
            repeats,
            seed,
            csv_out,
        } => {
            let rows = cmd_k_vs_eps(&KVsEpsArgs {
                input,
                k_list,
                repeats,
                seed,
                csv_out,
            })?;
            for row in rows {
                match row.epsilon {
                    Some(eps) => println!("k={} epsilon={eps:.4}", row.k),
                    None => println!("k={} epsilon=>=100", row.k),
                }
            }
        }
        Command::Oracle { input, k, seed } => {
            cmd_oracle(&OracleArgs { input, k, seed })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is an
            // input error (exit 3, keeping 2 for verification failures).
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::VerificationFailed(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
