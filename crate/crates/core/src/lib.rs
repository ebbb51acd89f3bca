//! Wavelet-frame state-space models.
//!
//! Builds discretized wavelet, Slepian, Daubechies and Legendre frames,
//! derives continuous-time `(A, B)` dynamics from them under the scaled and
//! translated measures, discretizes and runs the resulting recurrences, and
//! reproduces the N-term approximation and window-copying experiments.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `wavessm` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
mod error;
pub mod frames;
pub mod numerics;
pub mod safari;
pub mod ssm;
pub mod tasks;

pub use error::{Error, Result};

pub use frames::{build_frame, tighten, Family, FrameMatrix, FrameSpec, Grid};
pub use safari::{derive_scaled, derive_translated, Measure, SsmPair};
pub use ssm::{bilinear_discretize, DiscreteSsm, SteppingMode};
pub use numerics::{Matrix, SpectrumReport};

pub(crate) const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub(crate) fn fnv1a64_update(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_update(FNV_OFFSET, bytes)
}
