//! Seeded random streams and stable seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream type used throughout the crate.
///
/// ChaCha8 output is specified by the algorithm, not by the platform, so a
/// given seed yields the same sequence everywhere.
pub type Stream = ChaCha8Rng;

/// Creates a stream from a 64-bit seed.
pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Creates a stream from a seed and an independent substream id.
pub fn substream(seed: u64, id: u64) -> Stream {
    let mut s = Stream::seed_from_u64(seed);
    s.set_stream(id);
    s
}

/// 64-bit FNV-1a. Used for seed derivation because its output is fixed by
/// definition, unlike `std`'s default hasher.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable hash of an `(episode, label)` pair.
pub fn stable_hash(episode: u64, label: &str) -> u64 {
    let mut bytes = episode.to_le_bytes().to_vec();
    bytes.extend_from_slice(label.as_bytes());
    mix64(fnv1a(&bytes))
}

/// Seed for one episode of one policy: `base ^ stable_hash(episode, policy)`.
///
/// Adding or removing a policy never changes the seeds of the others.
pub fn episode_seed(base_seed: u64, episode: u64, policy: &str) -> u64 {
    base_seed ^ stable_hash(episode, policy)
}

/// Seed for the environment draw of an episode. Shared by every policy so
/// that all policies face the same random instance in a given episode.
pub fn environment_seed(base_seed: u64, episode: u64) -> u64 {
    base_seed ^ stable_hash(episode, "\u{0}environment")
}
