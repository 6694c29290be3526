//! Bipartite stochastic block model generator.
//!
//! Both vertex sets have `n = r * s` nodes split into `r` blocks of size
//! `s`; block `b` of the user side corresponds to block `b` of the feature
//! side. A cell inside corresponding blocks is present with probability `q`,
//! any other cell with probability `p`. Every cell's coin is derived from
//! `(seed, user, feature)` alone, so generation order (or parallelism) never
//! changes the output.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hashing::{hash3, unit_f64};
use crate::matrix::SparseBinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParams {
    /// Number of blocks.
    pub r: usize,
    /// Block size.
    pub s: usize,
    /// In-block edge probability.
    pub q: f64,
    /// Cross-block edge probability.
    pub p: f64,
    pub seed: u64,
}

impl SbmParams {
    pub fn new(r: usize, s: usize, q: f64, p: f64, seed: u64) -> Result<Self> {
        if r < 1 || s < 1 {
            return Err(Error::InvalidParameter(format!(
                "block counts must be positive, got r={r}, s={s}"
            )));
        }
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p > q {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= p <= q <= 1, got p={p}, q={q}"
            )));
        }
        Ok(Self { r, s, q, p, seed })
    }

    /// Nodes per side, `r * s`.
    pub fn n(&self) -> usize {
        self.r * self.s
    }

    /// Expected edges from a node into its corresponding block, `q * s`.
    pub fn internal_degree(&self) -> f64 {
        self.q * self.s as f64
    }

    /// Expected edges from a node outside its corresponding block,
    /// `p * (n - s)`.
    pub fn external_degree(&self) -> f64 {
        self.p * (self.n() - self.s) as f64
    }

    /// Expected total entry count.
    pub fn expected_entries(&self) -> f64 {
        self.n() as f64 * (self.internal_degree() + self.external_degree())
    }
}

/// Draw an `n x n` instance. Deterministic given `params` (including the
/// seed); rows are generated in parallel.
pub fn generate(params: &SbmParams) -> SparseBinaryMatrix {
    let n = params.n();
    let s = params.s;
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let block = u / s;
            let mut row = Vec::new();
            for f in 0..n {
                let prob = if f / s == block { params.q } else { params.p };
                if unit_f64(hash3(params.seed, u as u64, f as u64)) < prob {
                    row.push(f as u32);
                }
            }
            row
        })
        .collect();
    SparseBinaryMatrix::from_rows(n, rows).expect("generated rows are sorted and in range")
}

/// Edges-per-node rate `(2 ln n + 10) / ln(1/q)` that caps how many entries
/// any k-anonymous subgraph of an SBM draw can retain.
pub fn kanon_edge_rate(n: f64, q: f64) -> f64 {
    (2.0 * n.ln() + 10.0) / (1.0 / q).ln()
}

/// Upper bound on the entry count of any k-anonymous subgraph of an SBM draw
/// with `n` nodes per side and in-block probability `q`, valid (with
/// probability 99% over draws) once `k >= 2 ln n / ln(1/q)`.
pub fn kanon_edge_bound(n: usize, q: f64, k: usize) -> Result<u64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < q < 1, got q={q}"
        )));
    }
    let threshold = 2.0 * (n as f64).ln() / (1.0 / q).ln();
    if (k as f64) < threshold {
        return Err(Error::BoundNotApplicable(format!(
            "k={k} below required {threshold:.3}"
        )));
    }
    Ok((kanon_edge_rate(n as f64, q) * n as f64).ceil() as u64)
}
