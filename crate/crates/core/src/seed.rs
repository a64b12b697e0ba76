//! Deterministic seed derivation.
//!
//! Every random stream in the crate is keyed by a 64-bit global seed plus a
//! textual tag, so results depend only on *what* is generated, never on the
//! order in which it is requested. The mixing functions are fixed-width
//! integer arithmetic and therefore identical on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over raw bytes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Derive a sub-seed from a global seed, a namespace tag and a key.
pub fn derive(global: u64, tag: &str, key: &str) -> u64 {
    let t = fnv1a(tag.as_bytes());
    let k = fnv1a(key.as_bytes());
    splitmix64(splitmix64(global ^ t).wrapping_add(k))
}

/// Derive a sub-seed from a global seed and an integer index.
#[inline]
pub fn derive_index(global: u64, index: u64) -> u64 {
    splitmix64(splitmix64(global).wrapping_add(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(global: u64, tag: &str, key: &str) -> ChaCha8Rng {
    rng(derive(global, tag, key))
}

/// Fair coin keyed by (seed, index); used to break bundling ties.
#[inline]
pub fn coin(seed: u64, index: u64) -> bool {
    derive_index(seed, index) & 1 == 1
}
