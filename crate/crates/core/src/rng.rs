//! Deterministic random substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, domain, index)`, so results never depend on how work is split
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that must never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Permutation = 1,
    Background = 2,
    Replicate = 3,
    Reference = 4,
}

/// Generator for stream `index` within `domain` under `seed`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Packs a `(background, replicate)` pair into one stream index.
pub fn replicate_index(background: u32, replicate: u32) -> u64 {
    (u64::from(background) << 32) | u64::from(replicate)
}
