//! Randomized response over matrix cells, plus the closed-form utility and
//! hardness bounds that quantify when differential privacy can or cannot
//! preserve Jaccard similarity.
//!
//! The mechanism treats each cell independently: with probability `flip_p`
//! the cell is resampled uniformly from {0, 1}, otherwise the original value
//! is kept. Equivalently, a present entry survives with probability
//! `1 - flip_p/2` and an absent cell appears with probability `flip_p/2`.
//! The implementation is sparse-aware: it only touches present entries plus
//! a binomial number of sampled absent positions, never the full `n x m`
//! grid.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpMode {
    /// Protects the presence of a single cell.
    Edge,
    /// Protects a user's entire row.
    Node,
}

impl std::str::FromStr for DpMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(DpMode::Edge),
            "node" => Ok(DpMode::Node),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}', expected edge|node"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpParams {
    pub epsilon: f64,
    pub mode: DpMode,
    /// Probability of resampling a cell, derived from `epsilon` (and the
    /// feature count in node mode).
    pub flip_p: f64,
    pub seed: u64,
}

impl DpParams {
    pub fn edge(epsilon: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            epsilon,
            mode: DpMode::Edge,
            flip_p: edge_flip_probability(epsilon)?,
            seed,
        })
    }

    pub fn node(epsilon: f64, n_features: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            epsilon,
            mode: DpMode::Node,
            flip_p: node_flip_probability(epsilon, n_features)?,
            seed,
        })
    }
}

/// Resampling probability `2 / (1 + e^eps)` achieving eps-edge privacy.
pub fn edge_flip_probability(epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() && epsilon != f64::INFINITY {
        return Err(Error::InvalidParameter("epsilon must be a number".into()));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    Ok(2.0 / (1.0 + epsilon.exp()))
}

/// Resampling probability `2 / (1 + e^(eps/m))` achieving eps-node privacy
/// on matrices with `m` features.
pub fn node_flip_probability(epsilon: f64, n_features: usize) -> Result<f64> {
    if n_features == 0 {
        return Err(Error::InvalidParameter(
            "node mode needs at least one feature".into(),
        ));
    }
    edge_flip_probability(epsilon / n_features as f64)
}

/// Apply randomized response to every cell. Runs in expected time
/// proportional to `|E|` plus the number of created entries.
pub fn randomized_response(m: &SparseBinaryMatrix, params: &DpParams) -> SparseBinaryMatrix {
    let keep_p = 1.0 - params.flip_p / 2.0;
    let create_p = params.flip_p / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // Present entries survive independently.
    let mut rows: Vec<Vec<u32>> = m
        .rows()
        .map(|row| {
            row.iter()
                .copied()
                .filter(|_| rng.gen::<f64>() < keep_p)
                .collect()
        })
        .collect();

    // Absent cells appear independently; sample the count, then that many
    // distinct positions among the absent cells.
    let cells = m.n_users() as u64 * m.n_features() as u64;
    let absent = cells - m.entry_count() as u64;
    if absent > 0 && create_p > 0.0 {
        let count = Binomial::new(absent, create_p)
            .expect("probability already validated")
            .sample(&mut rng);
        let mut chosen: HashSet<u64> = HashSet::with_capacity(count as usize);
        while (chosen.len() as u64) < count {
            chosen.insert(rng.gen_range(0..absent));
        }
        let mut chosen: Vec<u64> = chosen.into_iter().collect();
        chosen.sort_unstable();

        // Walk rows once, translating global absent-cell ranks into
        // (user, feature) positions through the gaps of each sorted row.
        let m_features = m.n_features() as u64;
        let mut next = chosen.into_iter().peekable();
        let mut passed = 0u64; // absent cells in rows fully processed
        for u in 0..m.n_users() {
            let absent_here = m_features - m.row(u).len() as u64;
            let end = passed + absent_here;
            let mut created_here = Vec::new();
            while let Some(&rank) = next.peek() {
                if rank >= end {
                    break;
                }
                created_here.push(nth_absent(m.row(u), rank - passed));
                next.next();
            }
            if !created_here.is_empty() {
                let survived = std::mem::take(&mut rows[u]);
                rows[u] = merge_sorted(&survived, &created_here);
            }
            passed = end;
        }
    }

    SparseBinaryMatrix::from_rows(m.n_features(), rows)
        .expect("survivors and created cells stay sorted and in range")
}

/// Feature index of the `rank`-th absent cell (0-based) of a sorted row.
fn nth_absent(row: &[u32], rank: u64) -> u32 {
    let mut rank = rank;
    let mut base = 0u64; // first feature index not yet accounted for
    for &f in row {
        let gap = f as u64 - base;
        if rank < gap {
            return (base + rank) as u32;
        }
        rank -= gap;
        base = f as u64 + 1;
    }
    (base + rank) as u32
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `C(delta) = ln(2/delta) / 2`.
fn hoeffding_constant(delta: f64) -> f64 {
    (2.0 / delta).ln() / 2.0
}

/// Closed-form high-probability cap on the Jaccard similarity achievable by
/// eps-edge randomized response on a matrix of the given density with
/// `cells = n * m` total cells. Evaluated without checking the theorem's
/// applicability condition; see [`jaccard_upper_bound`] for the checked
/// variant.
pub fn jaccard_bound_formula(epsilon: f64, density: f64, cells: u64, delta: f64) -> f64 {
    let sig = 1.0 / (epsilon.exp() + 1.0);
    let asymptotic = (1.0 - sig) / (1.0 + sig * (1.0 - density) / density);
    asymptotic + 2.0 * (hoeffding_constant(delta) / cells as f64).sqrt()
}

/// Checked version of [`jaccard_bound_formula`]: with probability at least
/// `1 - delta` the mechanism's output Jaccard is below this value, provided
/// `flip_p / 4 >= sqrt(C(delta) / cells)`.
pub fn jaccard_upper_bound(epsilon: f64, density: f64, cells: u64, delta: f64) -> Result<f64> {
    if !(0.0 < density && density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    if cells == 0 {
        return Err(Error::InvalidParameter("cells must be positive".into()));
    }
    let flip_p = edge_flip_probability(epsilon)?;
    let tail = (hoeffding_constant(delta) / cells as f64).sqrt();
    if flip_p / 4.0 < tail {
        return Err(Error::BoundNotApplicable(format!(
            "flip_p/4 = {:.3e} below sqrt(C(delta)/cells) = {tail:.3e}",
            flip_p / 4.0
        )));
    }
    Ok(jaccard_bound_formula(epsilon, density, cells, delta))
}

/// Largest epsilon searched by [`min_epsilon_for_jaccard`]; beyond it the
/// bound is numerically indistinguishable from its limit.
pub const MAX_EPSILON: f64 = 100.0;

/// Smallest epsilon whose Jaccard cap reaches `target`, by bisection on the
/// monotone closed form to absolute tolerance 1e-4. `None` means the target
/// is unreachable below [`MAX_EPSILON`].
pub fn min_epsilon_for_jaccard(
    target: f64,
    density: f64,
    cells: u64,
    delta: f64,
) -> Result<Option<f64>> {
    if !(0.0 < target && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target must be in (0, 1), got {target}"
        )));
    }
    if !(0.0 < density && density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    if jaccard_bound_formula(MAX_EPSILON, density, cells, delta) < target {
        return Ok(None);
    }
    if jaccard_bound_formula(0.0, density, cells, delta) >= target {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0f64, MAX_EPSILON);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if jaccard_bound_formula(mid, density, cells, delta) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Floor on the epsilon of *any* edge-DP mechanism keeping expected Jaccard
/// at least `utility` on every `n x m` input:
/// `ln(utility^2 * n * m / (4 * (floor((nm)^0.9) + 1)))`. A negative value
/// is vacuous.
pub fn epsilon_lower_bound(utility: f64, n_users: u64, n_features: u64) -> f64 {
    let nm = n_users as f64 * n_features as f64;
    let l = nm.powf(0.9).floor();
    (utility * utility * nm / (4.0 * (l + 1.0))).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::diff_stats;

    #[test]
    fn flip_probability_closed_form() {
        assert_eq!(edge_flip_probability(0.0).unwrap(), 1.0);
        assert!((edge_flip_probability(3.0f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(edge_flip_probability(60.0).unwrap() < 1e-25);
        assert!(edge_flip_probability(-0.1).is_err());
    }

    #[test]
    fn node_flip_probability_reduces_to_edge() {
        for eps in [0.0, 0.5, 2.0, 7.0] {
            assert_eq!(
                node_flip_probability(eps, 1).unwrap(),
                edge_flip_probability(eps).unwrap()
            );
            assert_eq!(
                node_flip_probability(eps, 64).unwrap(),
                edge_flip_probability(eps / 64.0).unwrap()
            );
        }
        assert!((node_flip_probability(10.0, 100).unwrap() - 0.9500416).abs() < 1e-6);
        assert!(node_flip_probability(1.0, 0).is_err());
        // Fixed epsilon, growing m: flips everything.
        assert!(node_flip_probability(5.0, 1_000_000).unwrap() > 0.999_99);
    }

    #[test]
    fn zero_flip_is_identity() {
        let m = SparseBinaryMatrix::from_edges(20, 30, (0..20).map(|u| (u, (u % 7) as u32)))
            .unwrap();
        let params = DpParams::edge(1000.0, 5).unwrap();
        assert_eq!(params.flip_p, 0.0);
        assert_eq!(randomized_response(&m, &params), m);
    }

    #[test]
    fn full_flip_is_uniform_noise() {
        let m = SparseBinaryMatrix::empty(200, 200);
        let params = DpParams::edge(0.0, 17).unwrap();
        assert_eq!(params.flip_p, 1.0);
        let out = randomized_response(&m, &params);
        // Every cell Bernoulli(1/2): 40,000 cells, sd = 100.
        let got = out.entry_count() as f64;
        assert!((got - 20_000.0).abs() < 400.0, "got {got}");
    }

    #[test]
    fn large_epsilon_barely_changes_input() {
        let m = crate::sbm::generate(&crate::sbm::SbmParams::new(4, 16, 0.5, 0.05, 2).unwrap());
        let params = DpParams::edge(20.0, 9).unwrap();
        let out = randomized_response(&m, &params);
        let j = diff_stats(&m, &out).unwrap().jaccard();
        assert!(j > 0.999, "jaccard {j}");
    }

    #[test]
    fn different_seeds_differ() {
        let m = crate::sbm::generate(&crate::sbm::SbmParams::new(4, 16, 0.5, 0.05, 2).unwrap());
        let a = randomized_response(&m, &DpParams::edge(2.0, 1).unwrap());
        let b = randomized_response(&m, &DpParams::edge(2.0, 2).unwrap());
        assert_ne!(a, b);
        let again = randomized_response(&m, &DpParams::edge(2.0, 1).unwrap());
        assert_eq!(a, again);
    }

    #[test]
    fn survival_and_creation_rates_match() {
        let m = crate::sbm::generate(&crate::sbm::SbmParams::new(1, 256, 0.3, 0.3, 4).unwrap());
        let params = DpParams::edge(1.5, 21).unwrap();
        let keep_p = 1.0 - params.flip_p / 2.0;
        let create_p = params.flip_p / 2.0;
        let trials = 60;
        let (mut kept, mut created) = (0u64, 0u64);
        let entries = m.entry_count() as u64;
        let absent = 256u64 * 256 - entries;
        for t in 0..trials {
            let out = randomized_response(
                &m,
                &DpParams::edge(1.5, 1000 + t).unwrap(),
            );
            let d = diff_stats(&m, &out).unwrap();
            kept += d.intersection;
            created += d.created;
        }
        let kept_mean = entries as f64 * trials as f64 * keep_p;
        let kept_sd = (entries as f64 * trials as f64 * keep_p * (1.0 - keep_p)).sqrt();
        assert!(
            (kept as f64 - kept_mean).abs() < 4.0 * kept_sd,
            "kept {kept} vs {kept_mean} +- {kept_sd}"
        );
        let created_mean = absent as f64 * trials as f64 * create_p;
        let created_sd = (absent as f64 * trials as f64 * create_p * (1.0 - create_p)).sqrt();
        assert!(
            (created as f64 - created_mean).abs() < 4.0 * created_sd,
            "created {created} vs {created_mean} +- {created_sd}"
        );
    }

    #[test]
    fn nth_absent_walks_gaps() {
        let row = [2u32, 3, 7];
        let absents: Vec<u32> = (0..7).map(|r| nth_absent(&row, r)).collect();
        assert_eq!(absents, vec![0, 1, 4, 5, 6, 8, 9]);
        assert_eq!(nth_absent(&[], 5), 5);
    }

    #[test]
    fn bound_formula_limits() {
        // Dense case: denominator is 1.
        let tail = 2.0 * (hoeffding_constant(0.01) / 1_000_000f64).sqrt();
        let dense = jaccard_bound_formula(2.0, 1.0, 1_000_000, 0.01);
        let sig = 1.0 / (2.0f64.exp() + 1.0);
        assert!((dense - (1.0 - sig + tail)).abs() < 1e-12);
        // Large epsilon: vacuous 1 + tail.
        let huge = jaccard_bound_formula(80.0, 0.3, 1_000_000, 0.01);
        assert!((huge - (1.0 + tail)).abs() < 1e-9);
        assert!(huge > 1.0);
    }

    #[test]
    fn checked_bound_enforces_applicability() {
        // Paper-scale sparse setting is applicable around eps = 9..10.
        assert!((jaccard_upper_bound(9.0, 1e-4, 10u64.pow(10), 0.01).unwrap() - 0.44764).abs() < 1e-4);
        assert!((jaccard_upper_bound(10.0, 1e-4, 10u64.pow(10), 0.01).unwrap() - 0.68779).abs() < 1e-4);
        // Tiny matrices violate the condition.
        assert!(matches!(
            jaccard_upper_bound(5.0, 0.5, 16, 0.01),
            Err(Error::BoundNotApplicable(_))
        ));
        assert!(jaccard_upper_bound(2.0, 0.0, 100, 0.01).is_err());
    }

    #[test]
    fn min_epsilon_brackets_paper_figure() {
        let eps = min_epsilon_for_jaccard(0.5, 1e-4, 10u64.pow(10), 0.01)
            .unwrap()
            .unwrap();
        assert!(eps > 9.0 && eps < 10.0, "eps {eps}");
        assert!((eps - 9.2102).abs() < 1e-3);
        // Bound already above a minuscule target at eps = 0.
        let zero = min_epsilon_for_jaccard(0.01, 1.0, 10u64.pow(10), 0.01)
            .unwrap()
            .unwrap();
        assert_eq!(zero, 0.0);
        // Unreachable below the cap: at vanishing density even eps = 100
        // leaves the asymptotic term visibly short of the target.
        assert!(jaccard_bound_formula(MAX_EPSILON, 1e-40, 10u64.pow(18), 0.01) < 0.9999);
        assert_eq!(
            min_epsilon_for_jaccard(0.9999, 1e-40, 10u64.pow(18), 0.01).unwrap(),
            None
        );
        assert!(min_epsilon_for_jaccard(1.2, 0.5, 100, 0.01).is_err());
    }

    #[test]
    fn min_epsilon_monotone_in_density() {
        let mut last = f64::INFINITY;
        for lam in [1e-5, 1e-4, 1e-3, 1e-2, 1e-1] {
            let eps = min_epsilon_for_jaccard(0.5, lam, 10u64.pow(10), 0.01)
                .unwrap()
                .unwrap();
            assert!(eps <= last, "eps {eps} rose at density {lam}");
            last = eps;
        }
    }

    #[test]
    fn hardness_floor_closed_form() {
        let v = epsilon_lower_bound(1.0, 100_000, 100_000);
        assert!((v - 2.5f64.ln()).abs() < 1e-6, "got {v}");
        assert!(epsilon_lower_bound(1e-12, 100, 100) < 0.0);
        // Grows with the matrix volume.
        assert!(epsilon_lower_bound(1.0, 10_000_000, 100_000) > v);
    }
}
