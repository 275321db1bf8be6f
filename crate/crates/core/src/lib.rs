//! Polar and polarization-adjusted convolutional (PAC) codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`bmc`]: binary-input memoryless channels, their information measures
//!   (capacity, cutoff rate, Bhattacharyya parameter), LLRs and sampling.
//! - [`polarize`]: the polar transform and the synthesized bit-channels it
//!   creates, plus cumulative capacity / cutoff-rate profiles.
//! - [`sc`]: the successive-cancellation LLR tree shared by every decoder.
//! - [`polar`]: polar codes with SC and (CRC-aided) SC list decoding.
//! - [`pac`]: PAC codes with rate profiling, convolutional precoding and
//!   Fano sequential decoding.
//! - [`simkit`]: Monte-Carlo frame-error-rate estimation and the
//!   finite-blocklength dispersion reference.

pub mod bmc;
mod error;
pub mod pac;
pub mod polar;
pub mod polarize;
pub mod sc;
pub mod simkit;

pub use error::{Error, Result};

/// Returns `log2(len)` if `len` is a power of two (including 1).
pub(crate) fn log2_exact(len: usize) -> Option<usize> {
    if len.is_power_of_two() {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}
