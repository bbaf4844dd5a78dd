//! Seeded randomness.
//!
//! Every random decision in the crate draws from ChaCha8 (`rand_chacha`),
//! whose output is fixed by its seed on every platform. Sub-streams are
//! derived by hashing a master seed together with integer coordinates using
//! the SplitMix64 finalizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng64 = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `master` with a sequence of coordinates into a new seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived(master: u64, coords: &[u64]) -> Rng64 {
    seeded(derive_seed(master, coords))
}

/// Uniform index in `0..n` drawn through `u64` so the result does not depend
/// on the platform pointer width. `n` must be positive.
pub fn index<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.random_range(0..n as u64) as usize
}

/// Uniform draw in `[0, 1)`.
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
