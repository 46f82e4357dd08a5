//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 generator keyed by a 64-bit
//! root seed and selected by a 64-bit stream index (`rand_chacha`'s
//! `set_stream`). Streams with distinct indices are independent, and the
//! sequence produced for a given `(seed, stream)` pair is identical across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in experiment reports.
pub const GENERATOR_NAME: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64 + set_stream)";

pub type StreamRng = ChaCha8Rng;

/// Stream used for innate opinions.
pub const INNATE_STREAM: u64 = 1;
/// Stream used for resistance parameters.
pub const RESISTANCE_STREAM: u64 = 2;
/// Stream used for spectral-similarity probe vectors.
pub const PROBE_STREAM: u64 = 3;
/// Sparsifier worker `w` samples from stream `SPARSIFIER_STREAM_BASE + w`.
pub const SPARSIFIER_STREAM_BASE: u64 = 1 << 32;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
