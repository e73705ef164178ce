//! Shared fixtures, seeded random instance generators and brute-force
//! oracles for the headmt test suites.

pub mod criteria;
pub mod fixtures;
pub mod oracle;
pub mod random;

pub use fixtures::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
