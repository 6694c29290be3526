//! Minhash sharding for large inputs: order users by minhash signature,
//! cut the order into chunks, anonymize every chunk independently, and
//! stitch the outputs back together in original user order.
//!
//! Minhash puts users with similar rows near each other in the order, so
//! per-chunk clustering loses little against a run over the whole matrix,
//! while chunks parallelize embarrassingly. Per-chunk classes of size at
//! least `k` stay classes of size at least `k` globally, so the combined
//! release keeps the anonymity guarantee.

use rayon::prelude::*;

use crate::anonymize::{anonymize, report, AnonymizationReport, Mode};
use crate::clustering::FacilityConfig;
use crate::error::{Error, Result};
use crate::hashing::{hash2, hash3};
use crate::matrix::SparseBinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardConfig {
    /// Number of independent minhash functions per signature.
    pub num_hashes: usize,
    /// Users per chunk; an undersized final chunk is merged into the
    /// previous one.
    pub chunk_size: usize,
    /// Seeds the minhash functions (clustering seeds derive from the
    /// facility config, per chunk).
    pub seed: u64,
}

impl Default for ShardConfig {
    fn default() -> Self {
        Self {
            num_hashes: 8,
            chunk_size: 100_000,
            seed: 0,
        }
    }
}

impl ShardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_hashes == 0 {
            return Err(Error::InvalidParameter(
                "num_hashes must be at least 1".into(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidParameter(
                "chunk_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Minhash signature of a row: `signature[j] = min over features f of
/// hash3(seed, j, f)`. An empty row gets the all-max sentinel, so empty
/// rows sort last.
pub fn minhash_signature(row: &[u32], cfg: &ShardConfig) -> Vec<u64> {
    let mut signature = vec![u64::MAX; cfg.num_hashes];
    for &f in row {
        for (j, slot) in signature.iter_mut().enumerate() {
            let h = hash3(cfg.seed, j as u64, f as u64);
            if h < *slot {
                *slot = h;
            }
        }
    }
    signature
}

/// Users sorted by signature, lexicographically; ties keep original order.
pub fn shard_order(m: &SparseBinaryMatrix, cfg: &ShardConfig) -> Vec<usize> {
    let signatures: Vec<Vec<u64>> = (0..m.n_users())
        .into_par_iter()
        .map(|u| minhash_signature(m.row(u), cfg))
        .collect();
    let mut order: Vec<usize> = (0..m.n_users()).collect();
    order.sort_by(|&a, &b| signatures[a].cmp(&signatures[b]));
    order
}

/// Cut the shard order into consecutive chunks of `chunk_size` users (an
/// undersized final chunk merges into the previous one). Each chunk holds
/// its users in ascending original id, so a single chunk reproduces the
/// unsharded run exactly.
fn chunk_users(order: &[usize], chunk_size: usize, k: usize) -> Vec<Vec<usize>> {
    let mut chunks: Vec<Vec<usize>> = order
        .chunks(chunk_size)
        .map(|c| c.to_vec())
        .collect();
    if chunks.len() > 1 && chunks.last().map_or(0, |c| c.len()) < k {
        let tail = chunks.pop().expect("checked non-empty");
        chunks.last_mut().expect("len > 1").extend(tail);
    }
    for chunk in &mut chunks {
        chunk.sort_unstable();
    }
    chunks
}

/// Shard, anonymize every chunk independently (with a per-chunk derived
/// clustering seed), and combine. Chunks run in parallel; the worker count
/// never affects the output. The returned report aggregates global metrics
/// and global verification over the stitched matrix.
pub fn sharded_anonymize(
    m: &SparseBinaryMatrix,
    k: usize,
    mode: Mode,
    fcfg: &FacilityConfig,
    scfg: &ShardConfig,
) -> Result<AnonymizationReport> {
    let start = std::time::Instant::now();
    scfg.validate()?;
    if scfg.chunk_size < k {
        return Err(Error::InvalidParameter(format!(
            "chunk_size {} below k {k}",
            scfg.chunk_size
        )));
    }
    if m.n_users() < k {
        return Err(Error::NotEnoughUsers {
            n: m.n_users(),
            k,
        });
    }

    let order = shard_order(m, scfg);
    let chunks = chunk_users(&order, scfg.chunk_size, k);
    let results: Vec<(Vec<usize>, AnonymizationReport)> = chunks
        .into_par_iter()
        .enumerate()
        .map(|(idx, users)| {
            let rows: Vec<Vec<u32>> = users.iter().map(|&u| m.row(u).to_vec()).collect();
            let sub = SparseBinaryMatrix::from_rows(m.n_features(), rows)
                .expect("rows taken from a valid matrix");
            let mut chunk_cfg = *fcfg;
            chunk_cfg.seed = hash2(fcfg.seed, idx as u64);
            let report = anonymize(&sub, k, mode, &chunk_cfg)?;
            Ok((users, report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); m.n_users()];
    let mut cluster_count = 0;
    for (users, chunk_report) in results {
        cluster_count += chunk_report.cluster_count;
        for (local, &user) in users.iter().enumerate() {
            rows[user] = chunk_report.output.row(local).to_vec();
        }
    }
    let output = SparseBinaryMatrix::from_rows(m.n_features(), rows)
        .expect("chunk outputs are valid rows");
    report(m, output, k, mode, cluster_count, start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::unit_f64;
    use crate::matrix::{diff_stats, verify_k_anonymous};
    use crate::sbm::{generate, SbmParams};

    #[test]
    fn signatures_depend_only_on_row_content() {
        let cfg = ShardConfig::default();
        let a = minhash_signature(&[1, 5, 9], &cfg);
        let b = minhash_signature(&[1, 5, 9], &cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        let other_seed = ShardConfig {
            seed: 1,
            ..ShardConfig::default()
        };
        assert_ne!(a, minhash_signature(&[1, 5, 9], &other_seed));
        assert_eq!(minhash_signature(&[], &cfg), vec![u64::MAX; 8]);
    }

    #[test]
    fn signature_collision_rate_estimates_jaccard() {
        // Classical minhash property: a single hash collides with
        // probability equal to the Jaccard similarity of the two sets.
        let a: Vec<u32> = vec![0, 1, 2, 3];
        let b: Vec<u32> = vec![2, 3, 4, 5];
        // |intersection| = 2, |union| = 6.
        let expected = 2.0 / 6.0;
        let trials = 10_000u64;
        let mut collisions = 0u64;
        for seed in 0..trials {
            let cfg = ShardConfig {
                num_hashes: 1,
                chunk_size: 1,
                seed,
            };
            if minhash_signature(&a, &cfg) == minhash_signature(&b, &cfg) {
                collisions += 1;
            }
        }
        let rate = collisions as f64 / trials as f64;
        let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (rate - expected).abs() < 4.0 * sd,
            "rate {rate} vs {expected} +- {sd}"
        );
    }

    #[test]
    fn shard_order_is_stable_on_ties() {
        let m = SparseBinaryMatrix::from_rows(4, vec![vec![0, 1]; 5]).unwrap();
        let order = shard_order(&m, &ShardConfig::default());
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn empty_rows_sort_last() {
        let m =
            SparseBinaryMatrix::from_rows(4, vec![vec![], vec![2], vec![], vec![1]]).unwrap();
        let order = shard_order(&m, &ShardConfig::default());
        assert_eq!(&order[2..], &[0, 2]);
    }

    #[test]
    fn identical_blocks_stay_contiguous() {
        let m = generate(&SbmParams::new(4, 8, 1.0, 0.0, 6).unwrap());
        let order = shard_order(&m, &ShardConfig::default());
        // Rows within a block are identical, so each block occupies one
        // contiguous run of the order.
        let blocks: Vec<usize> = order.iter().map(|&u| u / 8).collect();
        let mut runs = 1;
        for w in blocks.windows(2) {
            if w[0] != w[1] {
                runs += 1;
            }
        }
        assert_eq!(runs, 4, "blocks interleaved: {blocks:?}");
    }

    #[test]
    fn single_chunk_matches_unsharded_run() {
        let m = generate(&SbmParams::new(4, 8, 0.8, 0.05, 13).unwrap());
        let fcfg = FacilityConfig::new(4).with_seed(77);
        let scfg = ShardConfig {
            chunk_size: m.n_users(),
            ..ShardConfig::default()
        };
        let sharded = sharded_anonymize(&m, 4, Mode::Smooth, &fcfg, &scfg).unwrap();
        let mut unsharded_cfg = fcfg;
        unsharded_cfg.seed = hash2(fcfg.seed, 0);
        let unsharded = anonymize(&m, 4, Mode::Smooth, &unsharded_cfg).unwrap();
        assert_eq!(sharded.output, unsharded.output);
        assert_eq!(sharded.cluster_count, unsharded.cluster_count);
    }

    #[test]
    fn undersized_tail_merges_into_previous_chunk() {
        // 20 users split 16+4 with k=8: the 4-user tail is undersized and
        // merges back, leaving a single chunk of 20.
        let m = generate(&SbmParams::new(5, 4, 0.9, 0.1, 3).unwrap());
        let order = shard_order(&m, &ShardConfig::default());
        let chunks = chunk_users(&order, 16, 8);
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].len(), 20);
        // A tail of exactly k stays separate.
        let chunks = chunk_users(&order, 12, 8);
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].len(), 12);
        assert_eq!(chunks[1].len(), 8);
        // Chunk membership covers every user exactly once.
        let mut all: Vec<usize> = chunks.concat();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn sharded_output_is_globally_anonymous() {
        let m = generate(&SbmParams::new(8, 16, 0.8, 0.02, 10).unwrap());
        let fcfg = FacilityConfig::new(8).with_seed(5);
        for chunk_size in [32usize, 64, 128] {
            let scfg = ShardConfig {
                chunk_size,
                ..ShardConfig::default()
            };
            for mode in [Mode::Smooth, Mode::Suppress] {
                let report = sharded_anonymize(&m, 8, mode, &fcfg, &scfg).unwrap();
                assert!(report.verified, "chunk {chunk_size} mode {mode:?}");
                assert!(verify_k_anonymous(&report.output, 8));
            }
        }
    }

    #[test]
    fn sharded_run_is_deterministic() {
        let m = generate(&SbmParams::new(8, 16, 0.8, 0.02, 20).unwrap());
        let fcfg = FacilityConfig::new(8).with_seed(5);
        let scfg = ShardConfig {
            chunk_size: 48,
            ..ShardConfig::default()
        };
        let a = sharded_anonymize(&m, 8, Mode::Smooth, &fcfg, &scfg).unwrap();
        let b = sharded_anonymize(&m, 8, Mode::Smooth, &fcfg, &scfg).unwrap();
        assert_eq!(a.output, b.output);
        assert_eq!(
            diff_stats(&a.output, &b.output).unwrap().jaccard(),
            1.0
        );
    }

    #[test]
    fn rejects_chunk_size_below_k() {
        let m = generate(&SbmParams::new(2, 8, 0.8, 0.1, 1).unwrap());
        let fcfg = FacilityConfig::new(8);
        let scfg = ShardConfig {
            chunk_size: 4,
            ..ShardConfig::default()
        };
        assert!(sharded_anonymize(&m, 8, Mode::Smooth, &fcfg, &scfg).is_err());
    }

    #[test]
    fn hash_draws_look_uniform_per_feature() {
        // Guards the minhash mixing against structured collisions across
        // neighboring features.
        let cfg = ShardConfig::default();
        let mut mean = 0.0;
        let n = 2000u64;
        for f in 0..n {
            mean += unit_f64(hash3(cfg.seed, 3, f));
        }
        mean /= n as f64;
        assert!((mean - 0.5).abs() < 0.03, "mean {mean}");
    }
}
