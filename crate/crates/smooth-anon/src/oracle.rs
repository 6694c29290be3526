//! Exhaustive ground truth on tiny instances, for approximation and
//! property tests: the best achievable smooth release over all valid
//! partitions, and exact facility location by subset enumeration.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::{hamming_distance, SparseBinaryMatrix};

/// Largest instance `brute_force_smooth_opt` accepts; partition counts stay
/// below a million rounds up to here.
pub const MAX_ORACLE_USERS: usize = 10;

/// Largest instance `brute_force_facility_location` accepts.
pub const MAX_FACILITY_POINTS: usize = 12;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_jaccard: f64,
    /// A partition achieving `best_jaccard`; every part has at least `k`
    /// users.
    pub best_partition: Vec<Vec<usize>>,
    /// Number of valid partitions examined.
    pub enumerated: u64,
}

/// Exact optimum of the smooth release: enumerate every partition of the
/// users into parts of size at least `k` and score the per-part majority
/// rounding against the input.
///
/// For a fixed part, a released feature must be held by at least half the
/// part; including any such feature adds equal mass to `|E ∩ E'|` and
/// `|E ∪ E'|`, so keeping every majority feature (ties included) maximizes
/// the Jaccard ratio for that partition. The enumeration therefore scores
/// exactly one release per partition.
pub fn brute_force_smooth_opt(m: &SparseBinaryMatrix, k: usize) -> Result<OracleResult> {
    let n = m.n_users();
    if n > MAX_ORACLE_USERS {
        return Err(Error::InstanceTooLarge {
            size: n,
            limit: MAX_ORACLE_USERS,
        });
    }
    if k == 0 || n < k {
        return Err(Error::NotEnoughUsers { n, k });
    }

    let entries = m.entry_count() as u64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0u64;

    let mut assignment = vec![0usize; n];
    let mut part_sizes: Vec<usize> = Vec::new();
    enumerate_partitions(
        m,
        k,
        0,
        &mut assignment,
        &mut part_sizes,
        &mut |assignment, n_parts| {
            enumerated += 1;
            let jaccard = partition_jaccard(m, assignment, n_parts, entries);
            let better = match &best {
                None => true,
                Some((best_j, _)) => jaccard > *best_j,
            };
            if better {
                best = Some((jaccard, assignment.to_vec()));
            }
        },
    );

    let (best_jaccard, assignment) = best.expect("at least one valid partition exists");
    let n_parts = assignment.iter().copied().max().unwrap_or(0) + 1;
    let mut best_partition = vec![Vec::new(); n_parts];
    for (u, &p) in assignment.iter().enumerate() {
        best_partition[p].push(u);
    }
    Ok(OracleResult {
        best_jaccard,
        best_partition,
        enumerated,
    })
}

/// Recursively assign users to parts in restricted-growth order, pruning
/// branches whose size deficits can no longer be filled.
fn enumerate_partitions(
    m: &SparseBinaryMatrix,
    k: usize,
    user: usize,
    assignment: &mut Vec<usize>,
    part_sizes: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize], usize),
) {
    let n = m.n_users();
    if user == n {
        if part_sizes.iter().all(|&s| s >= k) {
            visit(assignment, part_sizes.len());
        }
        return;
    }
    let remaining = n - user; // users not yet assigned, including this one
    for part in 0..=part_sizes.len() {
        let new_part = part == part_sizes.len();
        if new_part {
            part_sizes.push(0);
        }
        part_sizes[part] += 1;
        let deficit: usize = part_sizes.iter().map(|&s| k.saturating_sub(s)).sum();
        if deficit <= remaining - 1 {
            assignment[user] = part;
            enumerate_partitions(m, k, user + 1, assignment, part_sizes, visit);
        }
        part_sizes[part] -= 1;
        if new_part {
            part_sizes.pop();
        }
    }
}

/// Jaccard of the majority-rounded release for a partition given as a
/// per-user part id.
fn partition_jaccard(
    m: &SparseBinaryMatrix,
    assignment: &[usize],
    n_parts: usize,
    entries: u64,
) -> f64 {
    let mut part_sizes = vec![0usize; n_parts];
    for &p in assignment {
        part_sizes[p] += 1;
    }
    let mut counts: Vec<HashMap<u32, usize>> = vec![HashMap::new(); n_parts];
    for (u, &p) in assignment.iter().enumerate() {
        for &f in m.row(u) {
            *counts[p].entry(f).or_insert(0) += 1;
        }
    }
    let (mut intersection, mut created) = (0u64, 0u64);
    for (p, feature_counts) in counts.iter().enumerate() {
        for (_, &count) in feature_counts.iter() {
            if count * 2 >= part_sizes[p] {
                intersection += count as u64;
                created += (part_sizes[p] - count) as u64;
            }
        }
    }
    let union = entries + created;
    if union == 0 {
        1.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Exact facility location optimum by enumerating every non-empty facility
/// subset: `objective = sum of opened costs + sum of distances to the
/// nearest opened facility`. Returns the objective and the opened user ids.
pub fn brute_force_facility_location(
    m: &SparseBinaryMatrix,
    costs: &[f64],
) -> Result<(f64, Vec<usize>)> {
    let n = m.n_users();
    if n > MAX_FACILITY_POINTS {
        return Err(Error::InstanceTooLarge {
            size: n,
            limit: MAX_FACILITY_POINTS,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if costs.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} costs, got {}",
            costs.len()
        )));
    }
    let mut dist = vec![vec![0u64; n]; n];
    for a in 0..n {
        for b in 0..n {
            dist[a][b] = hamming_distance(m.row(a), m.row(b)) as u64;
        }
    }
    let mut best: Option<(f64, u32)> = None;
    for mask in 1u32..(1 << n) {
        let mut objective = 0.0;
        for fac in 0..n {
            if mask & (1 << fac) != 0 {
                objective += costs[fac];
            }
        }
        for point in 0..n {
            let nearest = (0..n)
                .filter(|fac| mask & (1 << fac) != 0)
                .map(|fac| dist[point][fac])
                .min()
                .expect("mask non-empty");
            objective += nearest as f64;
        }
        if best.map_or(true, |(obj, _)| objective < obj) {
            best = Some((objective, mask));
        }
    }
    let (objective, mask) = best.expect("at least one subset");
    let open = (0..n).filter(|fac| mask & (1 << fac) != 0).collect();
    Ok((objective, open))
}
