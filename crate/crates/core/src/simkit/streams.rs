//! Counter-based random substreams.
//!
//! Every frame draws from ChaCha8 streams keyed by `(seed, point, domain)`
//! with the frame index as the stream number, so a frame's randomness is a
//! pure function of `(seed, point index, frame index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent randomness domains within a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Source words.
    Data = 0,
    /// Channel noise; one variate per code symbol.
    Noise = 1,
    /// Monte-Carlo code construction.
    Construction = 2,
}

pub fn frame_stream(seed: u64, point: u64, frame: u64, domain: Stream) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    key[16] = domain as u8;
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(frame);
    rng
}

/// A 64-bit seed derived from `(seed, point, domain)`.
pub fn derive_seed(seed: u64, point: u64, domain: Stream) -> u64 {
    use rand::RngCore;
    frame_stream(seed, point, u64::MAX, domain).next_u64()
}
