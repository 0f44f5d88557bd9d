//! Counter-based deterministic random number generation.
//!
//! Every random stream in this crate is addressed by `(seed, label, index)`.
//! The triple is packed into a ChaCha key, so draw `index` of a labeled stream
//! is a pure function of its address — independent of batching, evaluation
//! order, and thread count. Labels keep subsystems (presampling, proposal
//! sampling, optimizer populations, ...) on non-overlapping streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// FNV-1a 64-bit hash, used to fold stream labels into the RNG key.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// RNG for draw `index` of the stream `(seed, label)`.
///
/// The key layout is `seed | fnv1a(label) | index | 0`, so distinct addresses
/// map to distinct ChaCha keys.
pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(label.as_bytes()).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// `dim` standard-normal draws for stream element `(seed, label, index)`.
pub fn standard_normal_vec(seed: u64, label: &str, index: u64, dim: usize) -> Vec<f64> {
    let rng = stream(seed, label, index);
    StandardNormal.sample_iter(rng).take(dim).collect()
}
