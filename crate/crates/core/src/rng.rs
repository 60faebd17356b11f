//! Reproducible random streams.
//!
//! Every consumer derives its generator from `(seed, tag, index)` so results do
//! not depend on thread scheduling: walker `i` always gets the same stream no
//! matter which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags, one per consumer, so that e.g. a net sample and a partition
/// drawn from the same user seed are independent.
pub mod tag {
    pub const WALK: u64 = 0x5741_4c4b;
    pub const RESTRICTED: u64 = 0x5245_5354;
    pub const GENERATOR: u64 = 0x4745_4e45;
    pub const NET_SAMPLE: u64 = 0x4e45_5453;
    pub const PARTITION: u64 = 0x5041_5254;
    pub const MTP: u64 = 0x4d54_5050;
    pub const SCALE: u64 = 0x5343_414c;
    pub const MARKOV_TYPE: u64 = 0x4d4b_5459;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a parent seed with a child index into a new 64-bit seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Independent generator for `(seed, tag, index)`.
pub fn substream(seed: u64, tag: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, tag));
    rng.set_stream(index);
    rng
}
