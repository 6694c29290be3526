//! Turn a clustering into a released matrix, and the end-to-end pipeline:
//! cluster, enforce minimum sizes, round, measure, verify.
//!
//! Two rounding rules are provided. Smooth rounding gives every member of a
//! cluster the cluster's majority row (a feature is kept iff at least half
//! the members hold it, ties included), which may create entries. Suppression
//! gives every member the intersection of the cluster's rows, so the output
//! is always a subset of the input.

use std::time::{Duration, Instant};

use crate::clustering::{
    enforce_min_size_merge, enforce_min_size_simple, solve_facility_location,
    Clustering, EnforceStrategy, FacilityConfig,
};
use crate::error::{Error, Result};
use crate::matrix::{
    diff_stats, verify_k_anonymous, verify_smooth_k_anonymous, SparseBinaryMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Smooth,
    Suppress,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Smooth => "smooth",
            Mode::Suppress => "suppress",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Mode::Smooth),
            "suppress" => Ok(Mode::Suppress),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}', expected smooth|suppress"
            ))),
        }
    }
}

/// Outcome of one anonymization run.
#[derive(Debug, Clone)]
pub struct AnonymizationReport {
    pub output: SparseBinaryMatrix,
    pub k: usize,
    pub mode: Mode,
    pub jaccard: f64,
    pub suppressed_frac: f64,
    pub created_frac: f64,
    /// Whether the output passed the verifier for its mode.
    pub verified: bool,
    pub cluster_count: usize,
    pub wall_time: Duration,
}

/// Replace every member's row by its cluster's majority row. Runs in time
/// proportional to the summed row lengths; absent features are never
/// iterated.
pub fn smooth_round(m: &SparseBinaryMatrix, c: &Clustering) -> SparseBinaryMatrix {
    round_clusters(m, c, |count, size| count * 2 >= size)
}

/// Replace every member's row by the intersection of its cluster's rows.
/// The output edge set is a subset of the input's.
pub fn suppress_round(m: &SparseBinaryMatrix, c: &Clustering) -> SparseBinaryMatrix {
    round_clusters(m, c, |count, size| count == size)
}

fn round_clusters(
    m: &SparseBinaryMatrix,
    c: &Clustering,
    keep: impl Fn(usize, usize) -> bool,
) -> SparseBinaryMatrix {
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); m.n_users()];
    for members in c.members() {
        let mut counts: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
        for &u in &members {
            for &f in m.row(u) {
                *counts.entry(f).or_insert(0) += 1;
            }
        }
        let mut common: Vec<u32> = counts
            .into_iter()
            .filter(|&(_, count)| keep(count, members.len()))
            .map(|(f, _)| f)
            .collect();
        common.sort_unstable();
        for &u in &members {
            rows[u] = common.clone();
        }
    }
    SparseBinaryMatrix::from_rows(m.n_features(), rows)
        .expect("rounded rows are sorted and in range")
}

/// Smooth rounding under an externally supplied partition of the users
/// (for instance the planted blocks of a generated instance).
pub fn smooth_round_with_clusters(
    m: &SparseBinaryMatrix,
    parts: &[Vec<usize>],
) -> Result<SparseBinaryMatrix> {
    let c = Clustering::from_partition(m, parts)?;
    Ok(smooth_round(m, &c))
}

/// Full pipeline: solve facility location, enforce the minimum cluster size
/// with the configured strategy, round, then measure and verify the release.
///
/// `k = 1` needs no clustering at all: singleton clusters reproduce the
/// input exactly, which is the optimum for both modes.
pub fn anonymize(
    m: &SparseBinaryMatrix,
    k: usize,
    mode: Mode,
    cfg: &FacilityConfig,
) -> Result<AnonymizationReport> {
    let start = Instant::now();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if m.n_users() < k {
        return Err(Error::NotEnoughUsers {
            n: m.n_users(),
            k,
        });
    }
    let clustering = if k == 1 {
        singleton_clustering(m)
    } else {
        let solved = solve_facility_location(m, cfg)?;
        match cfg.strategy {
            EnforceStrategy::Simple => enforce_min_size_simple(&solved, m, k)?,
            EnforceStrategy::Merge => enforce_min_size_merge(&solved, m, k, cfg)?,
        }
    };
    let output = match mode {
        Mode::Smooth => smooth_round(m, &clustering),
        Mode::Suppress => suppress_round(m, &clustering),
    };
    report(m, output, k, mode, clustering.n_clusters(), start)
}

fn singleton_clustering(m: &SparseBinaryMatrix) -> Clustering {
    Clustering {
        assignment: (0..m.n_users()).collect(),
        centers: m.rows().map(|r| r.to_vec()).collect(),
        total_cost: 0,
    }
}

pub(crate) fn report(
    original: &SparseBinaryMatrix,
    output: SparseBinaryMatrix,
    k: usize,
    mode: Mode,
    cluster_count: usize,
    start: Instant,
) -> Result<AnonymizationReport> {
    let stats = diff_stats(original, &output)?;
    let entries = original.entry_count() as u64;
    let (suppressed_frac, created_frac) = if entries == 0 {
        (0.0, 0.0)
    } else {
        stats.suppressed_created_fractions(entries)?
    };
    let verified = verify_k_anonymous(&output, k)
        && match mode {
            Mode::Smooth => verify_smooth_k_anonymous(&output, original, k)?,
            Mode::Suppress => stats.created == 0,
        };
    Ok(AnonymizationReport {
        output,
        k,
        mode,
        jaccard: stats.jaccard(),
        suppressed_frac,
        created_frac,
        verified,
        cluster_count,
        wall_time: start.elapsed(),
    })
}
