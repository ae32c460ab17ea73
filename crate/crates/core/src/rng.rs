//! Seed handling.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`] built from a `u64`
//! seed. Independent streams are derived from a parent seed and a label, so
//! that adding a new consumer never shifts an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a of `label`, mixed with `seed` through splitmix64.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let h = label
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME));
    splitmix64(seed ^ splitmix64(h))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator seeded with `seed`. Used for per-replicate
/// streams in simulation loops.
pub fn replicate(seed: u64, index: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
