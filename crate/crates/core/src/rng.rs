//! Seeding helpers.
//!
//! Every stochastic routine in this crate takes a generator argument; the
//! drivers construct them from explicit `u64` seeds so any run can be
//! replayed bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Re-exported so downstream crates can name the generator bound without
/// depending on `rand` directly.
pub use rand::Rng;

/// The project-wide generator: small, fast and stable across platforms.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed from a master seed and an index
/// (SplitMix64 finalizer over the mixed pair).
///
/// Used to give every evaluation episode its own stream, so episodes can
/// be replayed or reordered independently.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
