//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream derived
//! from a single 64-bit seed, so adding or reordering consumers never shifts
//! the numbers another consumer sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for signal sampling.
pub const STREAM_SIGNALS: u64 = 1;
/// Stream used for random initial dimension choices.
pub const STREAM_INITIAL_CHOICES: u64 = 2;
/// Stream used for specialist/generalist assignment.
pub const STREAM_POPULATION: u64 = 3;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
