//! Splitting one master seed into independent, stably indexed streams.
//!
//! Level `k` of a batch always derives its seed from `(master, k)` alone, so
//! growing a batch never changes the levels already in it. Within a level,
//! each consumer (type sequence, layout, room `i`) reads its own ChaCha stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEQUENCE_STREAM: u64 = 0;
pub const LAYOUT_STREAM: u64 = 1;
const FIRST_ROOM_STREAM: u64 = 2;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for level `index` of a batch generated from `master`.
pub fn level_seed(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ index)
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn room_stream(seed: u64, room_index: usize) -> ChaCha8Rng {
    stream(seed, FIRST_ROOM_STREAM + room_index as u64)
}
