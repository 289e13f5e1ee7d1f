//! Counter-based randomness: each round gets its own ChaCha stream.
//!
//! The key comes from the master seed, the stream id is the round index and
//! the word position counts draws within the round, so a round's randomness
//! does not depend on which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream reserved for the step-12 sampling of test bits.
const VERIFICATION_STREAM: u64 = u64::MAX;

pub fn round_rng(master_seed: u64, round_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(round_index);
    rng
}

pub fn verification_rng(master_seed: u64) -> ChaCha8Rng {
    round_rng(master_seed, VERIFICATION_STREAM)
}
