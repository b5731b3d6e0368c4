//! Seed derivation.
//!
//! Every random draw in the crate comes from one 64-bit run seed. A named
//! stream is derived by hashing the stream label with FNV-1a, mixing it
//! with the seed and an index through SplitMix64, and seeding a
//! Xoshiro256++ generator from the resulting SplitMix64 sequence.

use rand::SeedableRng;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub type StreamRng = Xoshiro256PlusPlus;

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of stream `(label, index)` from the run seed.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    splitmix(splitmix(seed ^ fnv1a(label)) ^ index)
}

/// Independent generator for stream `(label, index)`.
pub fn stream(seed: u64, label: &str, index: u64) -> StreamRng {
    let mut sm = SplitMix64::seed_from_u64(derive_seed(seed, label, index));
    Xoshiro256PlusPlus::from_rng(&mut sm).expect("SplitMix64 never fails")
}
