// SPDX-License-Identifier: Apache-2.0

//! Deterministic RNG derivation.
//!
//! Every stochastic stage derives its generator from (seed, domain, index)
//! so that parallel and serial executions draw identical streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derive an independent, reproducible RNG for one unit of work.
pub fn rng_for(seed: u64, domain: &str, index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(domain.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}
