//! Seeded random streams and replicate seed derivation.

use rand_pcg::Pcg64;

/// Deterministic generator owned by a single path or worker.
pub type RandomStream = Pcg64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer. A bijection on `u64`.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `replicate` under `master`.
///
/// `finalize(master ^ replicate * GOLDEN_GAMMA)`; for a fixed master this is
/// a composition of bijections, so distinct replicates never collide.
#[inline]
pub fn seed_derive(master: u64, replicate: u64) -> u64 {
    splitmix64(master ^ replicate.wrapping_mul(GOLDEN_GAMMA))
}

/// Independent streams derived from one seed, selected by `lane`.
pub fn stream(seed: u64, lane: u64) -> RandomStream {
    let hi = splitmix64(seed);
    let lo = splitmix64(seed ^ GOLDEN_GAMMA);
    Pcg64::new(((hi as u128) << 64) | lo as u128, lane as u128)
}

/// Stream lanes used by the simulation kernels.
pub mod lane {
    /// Walk increments (the W_k of a sieve path).
    pub const WALK: u64 = 1;
    /// Ball positions in the occupancy engine.
    pub const BALLS: u64 = 2;
}
