//! Counter-based seed derivation.
//!
//! Every realization gets its own seed computed from the master seed, a
//! stream label and its index, so results never depend on which worker ran
//! which realization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Seed for realization `index` of the stream identified by `label` and `key`.
pub fn derive_seed(master: u64, label: &str, key: &[u64], index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update((key.len() as u64).to_le_bytes());
    for k in key {
        h.update(k.to_le_bytes());
    }
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// SplitMix64 finalizer, used to split a single seed into sub-streams.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for sub-stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)))
}

/// Stable 64-bit key for a real parameter value.
pub fn float_key(v: f64) -> u64 {
    v.to_bits()
}
