//! Seeded random streams.
//!
//! Every stochastic step draws from a [`ChaCha8Rng`] built with `seed_from_u64`, so a run is
//! reproducible from its seed within this implementation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of indices into an independent child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}
