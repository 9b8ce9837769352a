//! Seed derivation and the random stream type used everywhere.
//!
//! Every stochastic task draws from its own [`StreamRng`] (ChaCha with eight
//! rounds, seeded through `rand_core`'s `seed_from_u64`). The 64-bit seed of a
//! task is derived from a master seed, a purpose tag and a list of integer
//! indices:
//!
//! ```text
//! h = splitmix64(master ^ fnv1a64(tag))
//! for each index i:  h = splitmix64(h ^ splitmix64(i + 0x9E3779B97F4A7C15))
//! ```
//!
//! Both mixing functions are fixed here, so streams are identical on every
//! platform and independent of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn derive_seed(master: u64, tag: &str, indices: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ fnv1a64(tag.as_bytes()));
    for &i in indices {
        h = splitmix64(h ^ splitmix64(i.wrapping_add(GOLDEN_GAMMA)));
    }
    h
}

pub fn stream(master: u64, tag: &str, indices: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, tag, indices))
}
