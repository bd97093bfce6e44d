//! Deterministic sub-seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` keyed by a `u64` that is
//! derived from the caller's seed and a stream index, so work can be split
//! across threads without changing any result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, stream: u64) -> u64 {
    mix(mix(seed) ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Seed that depends on the coordinates of a point, not on argument order.
pub fn derive_from_point(seed: u64, point: &[f64]) -> u64 {
    point
        .iter()
        .fold(mix(seed ^ 0x5eed), |acc, x| mix(acc ^ x.to_bits()))
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}
