//! Seeded 64-bit mixing used wherever a reproducible per-item draw is needed:
//! generator cell coins, minhash values, derived sub-seeds.
//!
//! The mixing function is fixed and public so that outputs are reproducible:
//! `mix64` is the SplitMix64 finalizer, and words are absorbed sequentially
//! as `h' = mix64(h + 0x9e3779b97f4a7c15 + w)` starting from
//! `h = mix64(seed ^ 0x9e3779b97f4a7c15)`.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer; bijective on `u64`.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

#[inline]
fn absorb(h: u64, w: u64) -> u64 {
    mix64(h.wrapping_add(GOLDEN).wrapping_add(w))
}

/// Hash a seed together with one word.
#[inline]
pub fn hash2(seed: u64, a: u64) -> u64 {
    absorb(mix64(seed ^ GOLDEN), a)
}

/// Hash a seed together with two words.
#[inline]
pub fn hash3(seed: u64, a: u64, b: u64) -> u64 {
    absorb(hash2(seed, a), b)
}

/// Map a hash to a uniform `f64` in `[0, 1)` using the top 53 bits.
#[inline]
pub fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
