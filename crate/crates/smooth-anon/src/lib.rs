//! Privacy-preserving releases of sparse binary matrices (equivalently,
//! bipartite user-feature graphs).
//!
//! Three release mechanisms over the same [`SparseBinaryMatrix`]
//! representation:
//!
//! - **smooth anonymization** ([`fn@anonymize`] with [`anonymize::Mode::Smooth`]):
//!   cluster users in Hamming space with a lower-bounded facility-location
//!   heuristic, then give every cluster its majority row. Every released row
//!   is shared by at least k users, and every released feature was held by
//!   at least half of its class.
//! - **k-anonymity by suppression** ([`anonymize::Mode::Suppress`]): same
//!   clustering, but each cluster keeps only the intersection of its rows,
//!   so the release never invents entries.
//! - **randomized response** ([`dp::randomized_response`]): per-cell noise
//!   achieving edge- or node-differential privacy, with closed-form bounds
//!   ([`dp::jaccard_upper_bound`], [`dp::epsilon_lower_bound`]) quantifying
//!   the utility such mechanisms can reach.
//!
//! Supporting machinery: a seeded bipartite stochastic block model generator
//! ([`sbm`]), minhash sharding for large inputs ([`shard`]), exhaustive
//! tiny-instance oracles ([`oracle`]), verifiers and metrics ([`matrix`]),
//! and an edge-list file format plus CSV reporting behind the `smooth-anon`
//! binary ([`cli`]).
//!
//! Start with the `examples/` directory: each file is a runnable walkthrough
//! of one capability.

pub mod anonymize;
pub mod cli;
pub mod clustering;
pub mod dp;
pub mod error;
pub mod hashing;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod report;
pub mod sbm;
pub mod shard;

pub use anonymize::{anonymize, AnonymizationReport, Mode};
pub use clustering::{Clustering, EnforceStrategy, FacilityConfig};
pub use dp::{DpMode, DpParams};
pub use error::{Error, Result};
pub use matrix::{diff_stats, DiffStats, SparseBinaryMatrix};
pub use sbm::SbmParams;
pub use shard::ShardConfig;
