//! Per-replicate random streams.
//!
//! Replicate `m` always draws from ChaCha8 stream `m` under the master seed, so
//! a replicate's numbers do not depend on which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ReplicateRng = ChaCha8Rng;

pub fn replicate_rng(seed: u64, replicate: u64) -> ReplicateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}
