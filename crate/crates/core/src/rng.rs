//! Counter-based random streams: every sample draws from a generator seeded
//! by its own coordinates, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed and a sequence of counters into one 64-bit key.
pub fn stream_key(seed: u64, counters: &[u64]) -> u64 {
    let mixed = counters.iter().fold(splitmix64(seed), |acc, &c| {
        splitmix64(acc.rotate_left(23) ^ splitmix64(c))
    });
    splitmix64(mixed ^ counters.len() as u64)
}

/// Generator for the stream identified by `seed` and `counters`.
pub fn stream(seed: u64, counters: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(seed, counters))
}

/// One standard normal deviate from the stream.
pub fn standard_normal(seed: u64, counters: &[u64]) -> f64 {
    StandardNormal.sample(&mut stream(seed, counters))
}
