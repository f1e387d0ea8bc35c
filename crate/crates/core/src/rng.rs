//! Keyed random substreams.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose key is built
//! from `(seed, domain, index)` and whose stream number is a further key
//! (an edge id, a row vertex, ...). Draws therefore depend only on their
//! key, never on evaluation order or thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_WEIGHTS: u64 = 1;
pub(crate) const DOMAIN_GRAPH: u64 = 2;
pub(crate) const DOMAIN_BINOMIAL: u64 = 3;
pub(crate) const DOMAIN_EXPERIMENT: u64 = 4;

pub(crate) fn substream(seed: u64, domain: u64, index: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Child seed for a nested experiment (e.g. one `(n, trial)` cell).
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    substream(seed, DOMAIN_EXPERIMENT, a, b).next_u64()
}
