//! Seeded random streams.
//!
//! Every trial owns a 64-bit seed derived from `(master_seed, n, trial)`.
//! The seed keys a ChaCha8 generator; spacings and noise read from two
//! distinct ChaCha streams of the same key, so the noise sequence never
//! depends on how many spacings a trace consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const SPACING_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const FIELD_STREAM: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Replay seed of one `(n, trial)` cell of an experiment.
pub fn derive_seed(master_seed: u64, n: u64, trial: u64) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ n);
    splitmix64(h ^ trial.rotate_left(32))
}

fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Independent generators for one trial.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    pub spacing: StreamRng,
    pub noise: StreamRng,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            spacing: stream(seed, SPACING_STREAM),
            noise: stream(seed, NOISE_STREAM),
        }
    }
}

/// Generator used to draw random fields.
pub fn field_rng(seed: u64) -> StreamRng {
    stream(seed, FIELD_STREAM)
}
