//! Shard a matrix by minhash order, anonymize the chunks independently (in
//! parallel), and check the stitched release against the unsharded run.
//!
//! ```bash
//! cargo run --release -p smooth-anon --example sharded_pipeline
//! ```

use smooth_anon::anonymize::{anonymize, Mode};
use smooth_anon::clustering::FacilityConfig;
use smooth_anon::hashing::hash2;
use smooth_anon::matrix::verify_k_anonymous;
use smooth_anon::sbm::{generate, SbmParams};
use smooth_anon::shard::{minhash_signature, shard_order, sharded_anonymize, ShardConfig};

fn main() {
    let m = generate(&SbmParams::new(16, 64, 0.8, 0.01, 11).unwrap());
    let k = 8;
    let fcfg = FacilityConfig::new(k).with_seed(2);
    let scfg = ShardConfig {
        chunk_size: 512,
        seed: 2,
        ..ShardConfig::default()
    };

    // Minhash signatures collide roughly in proportion to row similarity,
    // so sorting by signature pulls similar users together.
    let sig0 = minhash_signature(m.row(0), &scfg);
    println!("signature of user 0: {:x?}...", &sig0[..2]);
    let order = shard_order(&m, &scfg);
    println!(
        "shard order starts {:?}, ends {:?}",
        &order[..4],
        &order[order.len() - 4..]
    );

    let sharded = sharded_anonymize(&m, k, Mode::Smooth, &fcfg, &scfg).unwrap();
    println!(
        "\nsharded   (chunks of {}): jaccard {:.4}, {} clusters, verified {}",
        scfg.chunk_size, sharded.jaccard, sharded.cluster_count, sharded.verified
    );

    let mut whole_cfg = fcfg;
    whole_cfg.seed = hash2(fcfg.seed, 0);
    let unsharded = anonymize(&m, k, Mode::Smooth, &whole_cfg).unwrap();
    println!(
        "unsharded (single run):   jaccard {:.4}, {} clusters, verified {}",
        unsharded.jaccard, unsharded.cluster_count, unsharded.verified
    );
    println!(
        "quality loss from sharding: {:.4}",
        unsharded.jaccard - sharded.jaccard
    );

    // Per-chunk classes of size >= k stay size >= k globally.
    assert!(verify_k_anonymous(&sharded.output, k));
    println!("\nglobal {k}-anonymity after stitching: true");
}
