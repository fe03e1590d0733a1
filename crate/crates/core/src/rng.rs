//! Seed derivation.
//!
//! Every random object is drawn from its own ChaCha8 stream. A stream is named
//! by `(master seed, tag, index)`: the tag (an ensemble or subcommand name) is
//! folded into the master seed with 64-bit FNV-1a, the result is scrambled
//! with SplitMix64, and the index selects the ChaCha stream. Sample `k` of a
//! run therefore never depends on how many samples are drawn or on which
//! thread draws it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index` in a run tagged `tag`.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a(tag.as_bytes())) ^ splitmix64(index.wrapping_add(1)))
}

/// Generator for a single matrix sample.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sub-stream `stream` of the generator seeded by `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
