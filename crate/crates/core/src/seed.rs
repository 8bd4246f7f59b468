//! Counter-based seed derivation.
//!
//! Every randomized stage takes an explicit `u64` seed. Child seeds are
//! derived by hashing `(parent, index)` with SplitMix64 finalizers, so the
//! seed of shot 17 never depends on whether shots 0..16 ran first, or on
//! which thread ran them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of child `index` from `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    mix(mix(parent.wrapping_add(GOLDEN)) ^ index.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019))
}

/// Derive a seed from a path of indices, e.g. `(point, repetition, basis)`.
pub fn derive_path(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(parent, |s, &i| derive(s, i))
}

/// Derive a seed from a label (FNV-1a of its bytes), so that a child's seed
/// depends on what it is rather than on its position in a list.
pub fn derive_label(parent: u64, label: &str) -> u64 {
    let h = label.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3));
    derive(parent, h)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
