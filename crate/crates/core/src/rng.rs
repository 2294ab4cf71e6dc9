//! Seeded, named RNG substreams.
//!
//! One master seed spawns an independent stream per (tag, index) pair, so
//! that e.g. memoization hits (which consume no randomness) never perturb
//! the randomness seen by later consumers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

pub fn substream(master: u64, tag: &str, index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([tag.len() as u8]);
    hasher.update(tag.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(seed)
}
