//! Lower-bounded clustering of users in Hamming space via facility location.
//!
//! Users are embedded as points in `{0,1}^m` (their rows). Each user doubles
//! as a candidate facility whose opening cost charges `2a/(1-a)` times the
//! summed distance to its `beta * k` nearest users (`a = 1/beta`), which
//! steers facility density toward clusters of about `k` points. The facility
//! location instance is solved by repeated online passes (each point opens a
//! facility with probability `distance / cost`), keeping the cheapest run.
//! A size-enforcement step then guarantees every cluster has at least `k`
//! members.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hashing::hash2;
use crate::matrix::{hamming_distance, SparseBinaryMatrix};

/// How undersized clusters are repaired after facility location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnforceStrategy {
    /// Repeatedly close the smallest cluster below `k` and reassign its
    /// members to the nearest remaining facility.
    Simple,
    /// Close clusters below `a * k`, then merge small clusters pairwise,
    /// never letting a merge product exceed `2k` (donating members out of a
    /// large neighbor when it would).
    Merge,
}

impl std::str::FromStr for EnforceStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(EnforceStrategy::Simple),
            "merge" => Ok(EnforceStrategy::Merge),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy '{other}', expected simple|merge"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacilityConfig {
    /// Minimum cluster size to enforce.
    pub k: usize,
    /// Neighborhood multiplier for opening costs; must exceed 1.
    pub beta: f64,
    /// Number of independent online passes; the cheapest wins.
    pub n_runs: usize,
    pub seed: u64,
    pub strategy: EnforceStrategy,
}

impl FacilityConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            beta: 2.0,
            n_runs: 10,
            seed: 0,
            strategy: EnforceStrategy::Simple,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `a = 1 / beta`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.beta
    }

    /// `2a / (1 - a)`.
    pub fn cost_multiplier(&self) -> f64 {
        let a = self.alpha();
        2.0 * a / (1.0 - a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be a finite value above 1, got {}",
                self.beta
            )));
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Assignment of every user to one cluster, with one representative row per
/// cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Cluster id per user.
    pub assignment: Vec<usize>,
    /// Representative row per cluster.
    pub centers: Vec<Vec<u32>>,
    /// Sum of Hamming distances from each user to its cluster's center.
    pub total_cost: u64,
}

impl Clustering {
    pub fn n_clusters(&self) -> usize {
        self.centers.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.centers.len()];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Users of each cluster, grouped by cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.centers.len()];
        for (u, &c) in self.assignment.iter().enumerate() {
            members[c].push(u);
        }
        members
    }

    /// Wrap an externally supplied partition of the users; centers become
    /// the per-cluster majority rows.
    pub fn from_partition(m: &SparseBinaryMatrix, parts: &[Vec<usize>]) -> Result<Self> {
        let n = m.n_users();
        let mut assignment = vec![usize::MAX; n];
        for (c, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidParameter(format!("cluster {c} is empty")));
            }
            for &u in part {
                if u >= n {
                    return Err(Error::InvalidParameter(format!(
                        "user {u} out of range in cluster {c}"
                    )));
                }
                if assignment[u] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "user {u} appears in more than one cluster"
                    )));
                }
                assignment[u] = c;
            }
        }
        if let Some(u) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidParameter(format!(
                "user {u} missing from the partition"
            )));
        }
        let centers: Vec<Vec<u32>> = parts.iter().map(|part| majority_row(m, part)).collect();
        let total_cost = assignment_cost(m, &assignment, &centers);
        Ok(Self {
            assignment,
            centers,
            total_cost,
        })
    }
}

/// Row containing every feature held by at least half of `members`
/// (`2 * holders >= |members|`, ties included). This is the center that
/// minimizes the summed Hamming distance to the members.
pub fn majority_row(m: &SparseBinaryMatrix, members: &[usize]) -> Vec<u32> {
    let mut counts: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for &u in members {
        for &f in m.row(u) {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    let mut row: Vec<u32> = counts
        .into_iter()
        .filter(|&(_, c)| c * 2 >= members.len())
        .map(|(f, _)| f)
        .collect();
    row.sort_unstable();
    row
}

fn assignment_cost(m: &SparseBinaryMatrix, assignment: &[usize], centers: &[Vec<u32>]) -> u64 {
    assignment
        .iter()
        .enumerate()
        .map(|(u, &c)| hamming_distance(m.row(u), &centers[c]) as u64)
        .sum()
}

/// Opening cost of the facility co-located with `user`:
/// `2a/(1-a)` times the summed distance to its `floor(beta * k)` nearest
/// users (itself included, ties broken by user id). Uses all users when the
/// neighborhood exceeds the population.
pub fn opening_cost(user: usize, m: &SparseBinaryMatrix, cfg: &FacilityConfig) -> f64 {
    let n = m.n_users();
    let neighborhood = ((cfg.beta * cfg.k as f64).floor() as usize).min(n);
    let mut dists: Vec<(usize, usize)> = (0..n)
        .map(|v| (hamming_distance(m.row(user), m.row(v)), v))
        .collect();
    if neighborhood < n {
        dists.select_nth_unstable(neighborhood - 1);
        dists.truncate(neighborhood);
    }
    let sum: u64 = dists.iter().map(|&(d, _)| d as u64).sum();
    cfg.cost_multiplier() * sum as f64
}

/// Opening costs for every user, computed in parallel.
pub fn opening_costs(m: &SparseBinaryMatrix, cfg: &FacilityConfig) -> Vec<f64> {
    (0..m.n_users())
        .into_par_iter()
        .map(|u| opening_cost(u, m, cfg))
        .collect()
}

/// Outcome of one online facility-location pass.
#[derive(Debug, Clone)]
pub struct MeyersonRun {
    /// Users at which facilities opened, in opening order.
    pub facilities: Vec<usize>,
    /// Per-user index into `facilities`, as assigned at arrival time.
    pub assignment: Vec<usize>,
    /// Sum of opened facility costs plus arrival-time assignment distances.
    pub objective: f64,
}

/// One online pass in the given arrival order: the first point opens a
/// facility at itself; every later point `u` measures the distance `d` to
/// the nearest open facility and opens at itself with probability
/// `min(1, d / cost_u)` (certainly when `cost_u = 0 < d`, never when
/// `d = 0`), otherwise it is assigned to that nearest facility.
pub fn meyerson_run(
    m: &SparseBinaryMatrix,
    costs: &[f64],
    order: &[usize],
    seed: u64,
) -> Result<MeyersonRun> {
    let n = m.n_users();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if costs.len() != n || order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} costs and {n} order entries, got {} and {}",
            costs.len(),
            order.len()
        )));
    }
    if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidParameter(
            "opening costs must be finite and nonnegative".into(),
        ));
    }
    let mut seen = vec![false; n];
    for &u in order {
        if u >= n || seen[u] {
            return Err(Error::InvalidParameter(
                "order must be a permutation of the users".into(),
            ));
        }
        seen[u] = true;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facilities: Vec<usize> = Vec::new();
    let mut assignment = vec![usize::MAX; n];
    let mut opened_cost = 0.0f64;
    let mut distance_sum = 0u64;
    for &u in order {
        if facilities.is_empty() {
            facilities.push(u);
            assignment[u] = 0;
            opened_cost += costs[u];
            continue;
        }
        let (d, nearest) = nearest_facility(m, &facilities, u);
        if d == 0 {
            assignment[u] = nearest;
            continue;
        }
        let open_prob = if costs[u] > 0.0 {
            (d as f64 / costs[u]).min(1.0)
        } else {
            1.0
        };
        if rng.gen::<f64>() < open_prob {
            assignment[u] = facilities.len();
            facilities.push(u);
            opened_cost += costs[u];
        } else {
            assignment[u] = nearest;
            distance_sum += d as u64;
        }
    }
    Ok(MeyersonRun {
        facilities,
        assignment,
        objective: opened_cost + distance_sum as f64,
    })
}

fn nearest_facility(m: &SparseBinaryMatrix, facilities: &[usize], user: usize) -> (usize, usize) {
    let mut best = (usize::MAX, usize::MAX);
    for (idx, &fac) in facilities.iter().enumerate() {
        let d = hamming_distance(m.row(user), m.row(fac));
        if d < best.0 {
            best = (d, idx);
        }
    }
    best
}

/// Run `n_runs` seeded online passes over independently shuffled arrival
/// orders, keep the cheapest (ties to the lowest run index), then reassign
/// every user to its nearest open facility. Deterministic given the seed;
/// the passes execute in parallel.
pub fn solve_facility_location(m: &SparseBinaryMatrix, cfg: &FacilityConfig) -> Result<Clustering> {
    cfg.validate()?;
    let n = m.n_users();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let costs = opening_costs(m, cfg);
    let runs: Vec<MeyersonRun> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|i| {
            let run_seed = hash2(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(hash2(run_seed, 0));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            meyerson_run(m, &costs, &order, hash2(run_seed, 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .min_by(|a, b| a.objective.partial_cmp(&b.objective).expect("finite"))
        .expect("n_runs >= 1");

    // Cleanup pass: arrival-time assignments may no longer be nearest.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); best.facilities.len()];
    for u in 0..n {
        let (_, idx) = nearest_facility(m, &best.facilities, u);
        members[idx].push(u);
    }
    let mut assignment = vec![usize::MAX; n];
    let mut centers = Vec::new();
    for (idx, mem) in members.iter().enumerate() {
        if mem.is_empty() {
            continue;
        }
        let cluster = centers.len();
        centers.push(m.row(best.facilities[idx]).to_vec());
        for &u in mem {
            assignment[u] = cluster;
        }
    }
    let total_cost = assignment_cost(m, &assignment, &centers);
    Ok(Clustering {
        assignment,
        centers,
        total_cost,
    })
}

struct EnforceState {
    /// Facility coordinates; fixed while clusters are being closed/merged.
    centers: Vec<Vec<u32>>,
    members: Vec<Vec<usize>>,
    open: Vec<bool>,
}

impl EnforceState {
    fn from_clustering(c: &Clustering) -> Self {
        Self {
            centers: c.centers.clone(),
            members: c.members(),
            open: vec![true; c.n_clusters()],
        }
    }

    fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// Smallest open cluster strictly below `threshold` members, ties to the
    /// lowest cluster id.
    fn smallest_below(&self, threshold: f64) -> Option<usize> {
        (0..self.members.len())
            .filter(|&c| self.open[c] && (self.members[c].len() as f64) < threshold)
            .min_by_key(|&c| (self.members[c].len(), c))
    }

    fn close_and_reassign(&mut self, victim: usize, m: &SparseBinaryMatrix) {
        self.open[victim] = false;
        let moved = std::mem::take(&mut self.members[victim]);
        for u in moved {
            let mut best = (usize::MAX, usize::MAX);
            for c in 0..self.centers.len() {
                if !self.open[c] {
                    continue;
                }
                let d = hamming_distance(m.row(u), &self.centers[c]);
                if d < best.0 {
                    best = (d, c);
                }
            }
            self.members[best.1].push(u);
        }
    }

    /// Rebuild a `Clustering` from the surviving clusters, recomputing each
    /// center as the majority row of its members (which can only lower the
    /// cost).
    fn finish(self, m: &SparseBinaryMatrix) -> Clustering {
        let mut assignment = vec![usize::MAX; m.n_users()];
        let mut centers = Vec::new();
        for (c, mem) in self.members.iter().enumerate() {
            if !self.open[c] || mem.is_empty() {
                continue;
            }
            let cluster = centers.len();
            centers.push(majority_row(m, mem));
            for &u in mem {
                assignment[u] = cluster;
            }
        }
        let total_cost = assignment_cost(m, &assignment, &centers);
        Clustering {
            assignment,
            centers,
            total_cost,
        }
    }
}

/// Close clusters below `k` members (smallest first) and reassign their
/// members to the nearest remaining facility, until every cluster has at
/// least `k` members or a single cluster remains.
pub fn enforce_min_size_simple(
    c: &Clustering,
    m: &SparseBinaryMatrix,
    k: usize,
) -> Result<Clustering> {
    if m.n_users() < k {
        return Err(Error::NotEnoughUsers {
            n: m.n_users(),
            k,
        });
    }
    let mut state = EnforceState::from_clustering(c);
    while state.open_count() >= 2 {
        match state.smallest_below(k as f64) {
            Some(victim) => state.close_and_reassign(victim, m),
            None => break,
        }
    }
    Ok(state.finish(m))
}

/// Two-phase repair: first close clusters below `a * k` members (reassigning
/// members to their next-nearest facility), then greedily merge clusters of
/// size below `k` — each into the nearest-center other small cluster, or
/// into its nearest neighbor when it is the last small one. A merge that
/// would exceed `2k` members instead donates the deficit out of the large
/// neighbor, taking the members nearest to the small cluster's center.
pub fn enforce_min_size_merge(
    c: &Clustering,
    m: &SparseBinaryMatrix,
    k: usize,
    cfg: &FacilityConfig,
) -> Result<Clustering> {
    if m.n_users() < k {
        return Err(Error::NotEnoughUsers {
            n: m.n_users(),
            k,
        });
    }
    let mut state = EnforceState::from_clustering(c);

    let threshold = cfg.alpha() * k as f64;
    while state.open_count() >= 2 {
        match state.smallest_below(threshold) {
            Some(victim) => state.close_and_reassign(victim, m),
            None => break,
        }
    }

    loop {
        let open_ids: Vec<usize> = (0..state.members.len()).filter(|&c| state.open[c]).collect();
        if open_ids.len() <= 1 {
            break;
        }
        let mut smalls: Vec<usize> = open_ids
            .iter()
            .copied()
            .filter(|&c| state.members[c].len() < k)
            .collect();
        smalls.sort_by_key(|&c| (state.members[c].len(), c));
        let Some(&small) = smalls.first() else {
            break;
        };
        if smalls.len() >= 2 {
            // Merging two sub-k clusters can never exceed 2k.
            let target = smalls[1..]
                .iter()
                .copied()
                .min_by_key(|&t| {
                    (
                        hamming_distance(&state.centers[small], &state.centers[t]),
                        t,
                    )
                })
                .expect("at least one other small cluster");
            let moved = std::mem::take(&mut state.members[small]);
            state.open[small] = false;
            state.members[target].extend(moved);
        } else {
            let target = open_ids
                .iter()
                .copied()
                .filter(|&t| t != small)
                .min_by_key(|&t| {
                    (
                        hamming_distance(&state.centers[small], &state.centers[t]),
                        t,
                    )
                })
                .expect("at least two open clusters");
            if state.members[small].len() + state.members[target].len() <= 2 * k {
                let moved = std::mem::take(&mut state.members[small]);
                state.open[small] = false;
                state.members[target].extend(moved);
            } else {
                // Donate just enough members to lift the small cluster to k,
                // taking the ones nearest to its center; the donor stays
                // above k.
                let need = k - state.members[small].len();
                let mut donor = std::mem::take(&mut state.members[target]);
                donor.sort_by_key(|&u| {
                    (hamming_distance(m.row(u), &state.centers[small]), u)
                });
                let donated: Vec<usize> = donor.drain(..need).collect();
                state.members[target] = donor;
                state.members[small].extend(donated);
            }
        }
    }
    Ok(state.finish(m))
}
