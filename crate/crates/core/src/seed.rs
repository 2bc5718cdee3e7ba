//! Seed derivation for reproducible Monte Carlo runs.
//!
//! Every random object is drawn from a [`ChaCha8Rng`] seeded with a 64-bit
//! value. Per-trial seeds are derived from a master seed by folding the
//! trial coordinates through the SplitMix64 finalizer, so a trial's stream
//! depends only on `(master, coordinates)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `derive(master, [a, b, ...])`: hash of the master seed and a path of
/// coordinates (ensemble, k, trial index, ...).
pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master.wrapping_add(GOLDEN_GAMMA)), |h, &p| {
        mix64(h ^ mix64(p.wrapping_add(GOLDEN_GAMMA)).rotate_left(17))
    })
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent seeds of one recovery trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub sequence: u64,
    pub signal: u64,
}

impl TrialSeeds {
    pub fn new(master: u64, k: usize, trial: usize) -> Self {
        let base = derive(master, &[k as u64, trial as u64]);
        TrialSeeds {
            sequence: derive(base, &[0]),
            signal: derive(base, &[1]),
        }
    }
}
