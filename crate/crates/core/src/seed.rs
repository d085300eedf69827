//! Seed derivation for reproducible, independent random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with a
//! 64-bit value. Runs executed in parallel derive their own seeds from a
//! master seed so the outcome never depends on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used when deriving seeds. Distinct tags give unrelated streams.
pub mod tag {
    pub const TRAIN: u64 = 0x7472_6169_6e00_0001;
    pub const TEST: u64 = 0x7465_7374_0000_0002;
    pub const SELECTION: u64 = 0x7365_6c65_6374_0003;
    pub const POOL: u64 = 0x706f_6f6c_0000_0004;
    pub const EXTERNAL: u64 = 0x6578_7465_726e_0005;
    pub const CV: u64 = 0x6376_0000_0000_0006;
    pub const ORACLE: u64 = 0x6f72_6163_6c65_0007;
    pub const RETRY: u64 = 0x7265_7472_7900_0008;
    pub const GRID: u64 = 0x6772_6964_0000_0009;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `(master, index, tag)` into a new seed.
pub fn derive(master: u64, index: u64, tag: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93));
    splitmix64(b ^ tag)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
