//! Deterministic RNG substreams.
//!
//! Every random draw in this crate comes from a ChaCha stream keyed by
//! `(seed, role, indices)` through SHA-256. Substreams are mutually
//! independent, so factor paths, coefficient draws and shuffle replicates
//! can be generated in any order (or in parallel) without changing results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive an independent RNG stream for `role` under a master `seed`.
///
/// `indices` distinguishes streams of the same role (replicate, stock, ...).
pub fn substream(seed: u64, role: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((role.len() as u64).to_le_bytes());
    hasher.update(role.as_bytes());
    for ix in indices {
        hasher.update(ix.to_le_bytes());
    }
    ChaCha8Rng::from_seed(hasher.finalize().into())
}
