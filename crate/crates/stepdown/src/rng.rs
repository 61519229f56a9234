//! Reproducible random number streams.
//!
//! Replicates draw from a counter-based ChaCha8 generator: the experiment
//! seed keys the cipher and the replicate id selects the stream, so each
//! replicate gets an independent, reproducible substream regardless of how
//! replicates are scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator for one replicate of a seeded experiment.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}
