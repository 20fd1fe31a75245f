//! Deterministic random streams.
//!
//! Every experiment draws from a ChaCha stream seeded explicitly; there is
//! no wall-clock seeding anywhere. Sub-experiments (sweep cells, dynamic
//! frames) derive independent seeds so results do not depend on execution
//! order or parallelism.

pub use rand_chacha::ChaCha8Rng;

use rand::SeedableRng;

/// Creates the deterministic generator used throughout segi.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed for one experiment substream.
///
/// `experiment` indexes the replicate (e.g. the seed slot of a sweep) and
/// `frame` indexes a dynamic-scene frame; both are 0 where not applicable.
/// The mixing is a fixed SplitMix64 chain, so derived seeds are stable
/// across platforms and releases.
pub fn derive_seed(master: u64, experiment: u64, frame: u64) -> u64 {
    let mut h = mix(master ^ 0x9e37_79b9_7f4a_7c15);
    h = mix(h ^ experiment.wrapping_mul(0xa076_1d64_78bd_642f));
    h = mix(h ^ frame.wrapping_mul(0xe703_7ed1_a0b4_28db));
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
