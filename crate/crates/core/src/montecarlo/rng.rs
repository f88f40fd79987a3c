//! Keyed random streams.
//!
//! Every simulation splits its replicates into a fixed number of partitions.
//! Partition `k` of a run with seed `s` draws from the ChaCha8 stream `k`
//! under the key derived from `s`, so the counts do not depend on how many
//! threads execute the partitions or in which order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::distributions::phi_inv;

pub(crate) type Stream = ChaCha8Rng;

pub(crate) fn stream(seed: u64, partition: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(partition);
    rng
}

/// SplitMix64 finalizer; used to derive child seeds.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th child of `seed` (grid points, auxiliary samplers).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Uniform on the open interval (0, 1) with 53 random bits.
#[inline]
pub(crate) fn uniform(rng: &mut Stream) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal by inversion of a uniform draw.
#[inline]
pub(crate) fn std_normal(rng: &mut Stream) -> f64 {
    phi_inv(uniform(rng))
}
