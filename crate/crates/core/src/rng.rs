//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8, a counter-based stream
//! cipher generator. Experiments that run many independent trials derive one
//! sub-seed per trial with [`derive_seed`], so results do not depend on the
//! order in which trials execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a tuple of words into a seed. Order matters.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

/// Sub-seed for one Monte-Carlo trial.
pub fn trial_seed(master: u64, n: usize, p: f64, trial: usize) -> u64 {
    derive_seed(&[master, n as u64, p.to_bits(), trial as u64])
}
