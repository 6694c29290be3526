//! Sparse binary matrices (equivalently bipartite user-feature graphs),
//! edge-set algebra, similarity metrics, and anonymity verifiers.
//!
//! A matrix is stored as one sorted, duplicate-free feature-index list per
//! user. The dense `n x m` form is never materialized; everything here runs
//! in time proportional to the number of present entries.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// An `n_users x n_features` binary matrix with sparse 1-entries.
///
/// Row `u` holds the sorted feature indices user `u` is associated with; the
/// set of all `(user, feature)` pairs is the edge set of the bipartite graph
/// view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_users: usize,
    n_features: usize,
    rows: Vec<Vec<u32>>,
}

impl SparseBinaryMatrix {
    /// Matrix with no entries.
    pub fn empty(n_users: usize, n_features: usize) -> Self {
        Self {
            n_users,
            n_features,
            rows: vec![Vec::new(); n_users],
        }
    }

    /// Build from per-user rows. Each row must be strictly increasing and all
    /// indices must lie in `[0, n_features)`.
    pub fn from_rows(n_features: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        for (u, row) in rows.iter().enumerate() {
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidParameter(format!(
                        "row {u} is not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last as usize >= n_features {
                    return Err(Error::InvalidParameter(format!(
                        "row {u} has feature {last} >= n_features {n_features}"
                    )));
                }
            }
        }
        Ok(Self {
            n_users: rows.len(),
            n_features,
            rows,
        })
    }

    /// Build from an unordered edge list. Rejects duplicate and out-of-range
    /// edges.
    pub fn from_edges(
        n_users: usize,
        n_features: usize,
        edges: impl IntoIterator<Item = (usize, u32)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); n_users];
        for (u, f) in edges {
            if u >= n_users {
                return Err(Error::InvalidParameter(format!(
                    "user {u} >= n_users {n_users}"
                )));
            }
            if f as usize >= n_features {
                return Err(Error::InvalidParameter(format!(
                    "feature {f} >= n_features {n_features}"
                )));
            }
            rows[u].push(f);
        }
        for (u, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate entry ({u}, {})",
                        w[0]
                    )));
                }
            }
        }
        Ok(Self {
            n_users,
            n_features,
            rows,
        })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, user: usize) -> &[u32] {
        &self.rows[user]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    /// Total number of present entries, `|E|`.
    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// `|E| / (n_users * n_features)`; 0 for degenerate shapes.
    pub fn density(&self) -> f64 {
        let cells = self.n_users as f64 * self.n_features as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.entry_count() as f64 / cells
        }
    }

    /// All `(user, feature)` entries in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&f| (u, f)))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_users == other.n_users && self.n_features == other.n_features
    }

    fn shape_check(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_users: self.n_users,
                left_features: self.n_features,
                right_users: other.n_users,
                right_features: other.n_features,
            })
        }
    }
}

/// Size of the symmetric difference of two sorted duplicate-free index lists.
pub fn hamming_distance(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - 2 * shared
}

/// Exact set counts comparing an original edge set with another one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffStats {
    /// `|E ∩ E'|`
    pub intersection: u64,
    /// `|E ∪ E'|`
    pub union: u64,
    /// `|E \ E'|` — entries of the original missing from the other.
    pub removed: u64,
    /// `|E' \ E|` — entries of the other not present in the original.
    pub created: u64,
}

impl DiffStats {
    /// Jaccard similarity `|E ∩ E'| / |E ∪ E'|`; two empty edge sets are
    /// identical objects, so their similarity is defined as 1.
    pub fn jaccard(&self) -> f64 {
        if self.union == 0 {
            1.0
        } else {
            self.intersection as f64 / self.union as f64
        }
    }

    /// `|E ⊕ E'|`
    pub fn symmetric_difference(&self) -> u64 {
        self.removed + self.created
    }

    /// `(removed / |E|, created / |E|)`, both normalized by the entry count
    /// of the original matrix.
    pub fn suppressed_created_fractions(&self, original_entries: u64) -> Result<(f64, f64)> {
        if original_entries == 0 {
            return Err(Error::InvalidParameter(
                "cannot normalize fractions by an empty original".into(),
            ));
        }
        Ok((
            self.removed as f64 / original_entries as f64,
            self.created as f64 / original_entries as f64,
        ))
    }
}

/// Compare two matrices of the same shape entry-wise.
pub fn diff_stats(original: &SparseBinaryMatrix, other: &SparseBinaryMatrix) -> Result<DiffStats> {
    original.shape_check(other)?;
    let (mut intersection, mut removed, mut created) = (0u64, 0u64, 0u64);
    for u in 0..original.n_users {
        let (a, b) = (original.row(u), other.row(u));
        let shared = {
            let (mut i, mut j, mut shared) = (0usize, 0usize, 0u64);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        shared += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
            shared
        };
        intersection += shared;
        removed += a.len() as u64 - shared;
        created += b.len() as u64 - shared;
    }
    Ok(DiffStats {
        intersection,
        union: intersection + removed + created,
        removed,
        created,
    })
}

/// Grouping of users by exact row equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClasses {
    /// Class id per user; ids are assigned in order of first occurrence.
    pub class_of: Vec<usize>,
    /// Member count per class id.
    pub class_sizes: Vec<usize>,
}

impl EquivalenceClasses {
    pub fn n_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// Users of each class, grouped by class id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.class_sizes.len()];
        for (u, &c) in self.class_of.iter().enumerate() {
            members[c].push(u);
        }
        members
    }
}

pub fn equivalence_classes(m: &SparseBinaryMatrix) -> EquivalenceClasses {
    let mut ids: HashMap<&[u32], usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(m.n_users);
    let mut class_sizes = Vec::new();
    for u in 0..m.n_users {
        let next = class_sizes.len();
        let id = *ids.entry(m.row(u)).or_insert(next);
        if id == class_sizes.len() {
            class_sizes.push(0);
        }
        class_sizes[id] += 1;
        class_of.push(id);
    }
    EquivalenceClasses {
        class_of,
        class_sizes,
    }
}

/// True iff every equivalence class of `m` has at least `k` members.
pub fn verify_k_anonymous(m: &SparseBinaryMatrix, k: usize) -> bool {
    equivalence_classes(m).class_sizes.iter().all(|&s| s >= k)
}

/// True iff (1) every equivalence class of `output` has at least `k`
/// members, and (2) every feature present in a class's common row was held
/// in the `original` matrix by at least half of the class
/// (`holders * 2 >= |class|`, ties counting as a majority).
pub fn verify_smooth_k_anonymous(
    output: &SparseBinaryMatrix,
    original: &SparseBinaryMatrix,
    k: usize,
) -> Result<bool> {
    output.shape_check(original)?;
    let classes = equivalence_classes(output);
    if classes.class_sizes.iter().any(|&s| s < k) {
        return Ok(false);
    }
    for members in classes.members() {
        let common = output.row(members[0]);
        if common.is_empty() {
            continue;
        }
        // holders[i] counts members that originally held common[i]
        let mut holders = vec![0usize; common.len()];
        for &u in &members {
            let row = original.row(u);
            let (mut i, mut j) = (0usize, 0usize);
            while i < common.len() && j < row.len() {
                match common[i].cmp(&row[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        holders[i] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        if holders.iter().any(|&h| h * 2 < members.len()) {
            return Ok(false);
        }
    }
    Ok(true)
}
