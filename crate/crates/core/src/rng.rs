//! Deterministic RNG stream derivation.
//!
//! Every randomized routine takes a stream derived from a user seed plus a
//! purpose tag (and an index for per-trial streams), so runs are reproducible
//! regardless of thread count or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// RNG stream for (`seed`, `tag`, `index`).
pub fn stream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(tag.as_bytes()).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    let mix = fnv1a(&key[0..24]);
    key[24..32].copy_from_slice(&mix.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
