//! Seeded, platform-independent random streams.
//!
//! Everything random in the engine goes through ChaCha8 so that recorded
//! seeds replay bit-for-bit on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for item `index` under `seed` (witness, round, ...).
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// 64-bit FNV-1a over a sequence of strings, each terminated by a 0xff byte.
/// Stable across Rust releases, unlike `DefaultHasher`.
pub fn stable_hash<'a, I>(parts: I) -> u64
where
    I: IntoIterator<Item = &'a str>,
{
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in part.as_bytes().iter().chain(std::iter::once(&0xffu8)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
