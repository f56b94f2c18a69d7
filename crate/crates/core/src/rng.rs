//! Seeded RNG substreams.
//!
//! All randomness in a run flows from one global seed through named
//! substreams, so reruns of any single stage (or any single conversation)
//! are stable no matter what ran before them. A substream is identified by
//! the stage name plus zero or more indices, e.g. `("generate", conv_idx)`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a deterministic RNG for a named substream of `seed`.
pub fn substream(seed: u64, labels: &[&str]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for label in labels {
        hasher.update([0x1f]); // separator so ["ab","c"] != ["a","bc"]
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Convenience for substreams indexed by an integer, e.g. one per conversation.
pub fn substream_indexed(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    substream(seed, &[label, &index.to_string()])
}

/// Stable 64-bit hash of arbitrary bytes (FNV-1a). Used where we need a
/// deterministic, platform-independent hash rather than randomness.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// splitmix64 finalizer; decorrelates related inputs into well-mixed u64s.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}
