//! Deterministic seed splitting.
//!
//! Every random choice in an experiment descends from a single root seed
//! through a fixed tree: trial -> repetition -> copy. Children are derived
//! with a SplitMix64 finalizer so sibling streams are decorrelated and the
//! result does not depend on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every measurement and every random choice.
pub type SimRng = ChaCha8Rng;

/// Stream tags for children that are not indexed by trial, repetition or copy.
pub mod stream {
    pub const DATABASE: u64 = 0xdb;
    pub const SEARCH: u64 = 0x5e;
    pub const PARTITION: u64 = 0x9a;
    pub const COPY_BASE: u64 = 0x1_0000;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of child `index` of `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ splitmix64(index.wrapping_add(0x6a09_e667_f3bc_c909)))
}

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
