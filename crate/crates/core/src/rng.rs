//! Seeded random streams.
//!
//! Every stochastic step draws from ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)`, with a distinct stream id per purpose so that, e.g.,
//! changing the number of training epochs never perturbs parameter
//! initialisation. Uniform reals use `rand`'s 53-bit conversion, integer ranges
//! use `random_range` and shuffles use `SliceRandom::shuffle` (Fisher-Yates).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Prng = ChaCha8Rng;

/// Stream ids. Values are part of the reproducibility contract; do not renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 0,
    Shuffle = 1,
    Split = 2,
    RandomBands = 3,
    Synthetic = 4,
    GradCheck = 5,
}

pub fn stream(seed: u64, which: Stream) -> Prng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
