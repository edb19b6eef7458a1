//! Per-component random streams derived from one episode seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams carved out of one episode seed, so that adding
/// draws in one component never shifts another component's sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Layout = 0,
    Task = 1,
    Actor = 2,
    Reporter = 3,
    Planner = 4,
    Trainer = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
