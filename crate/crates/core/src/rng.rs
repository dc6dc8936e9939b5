//! Counter-based random substreams.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by
//! `(seed, stream id)`, so results never depend on the order in which
//! replicates or resamples are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const GENERATOR_NAME: &str = "chacha8-stream64";
pub const NORMAL_METHOD: &str = "ziggurat";

/// What a substream is used for; part of the stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Role {
    Theta1 = 1,
    Theta2 = 2,
    Error = 3,
    Bootstrap = 4,
    Phi = 5,
}

/// Stream id for `(index, role)`; `index` must be below `2^56`.
#[inline]
pub fn stream_id(index: u64, role: Role) -> u64 {
    debug_assert!(index < 1 << 56);
    (index << 8) | role as u64
}

pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a parent seed and a key path.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix(seed), |acc, &k| splitmix(acc ^ splitmix(k)))
}
