//! Deterministic seed derivation for independent random streams.
//!
//! All stochastic stages take an explicit seed. Sub-stages derive their own
//! seeds from a master seed plus a label so that adding or reordering stages
//! never perturbs unrelated streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed, a stage label, and an index.
pub fn derive(master: u64, label: &str, index: u64) -> u64 {
    let mut h = splitmix64(master);
    for b in label.as_bytes() {
        h = splitmix64(h ^ u64::from(*b));
    }
    splitmix64(h ^ index)
}

/// Seeded RNG for a derived stream.
pub fn rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, label, index))
}
