//! Discrete prolate spheroidal (Slepian) tapers.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numerics::sym_tridiag_eig;
use crate::{Error, Result};

/// Tridiagonal whose eigenvectors are the Slepian tapers of length `m` and
/// half-bandwidth `w` (cycles per sample).
pub fn dpss_tridiagonal(m: usize, w: f64) -> (Vec<f64>, Vec<f64>) {
    let cos = libm::cos(2.0 * PI * w);
    let diag = (0..m)
        .map(|i| {
            let a = (m as f64 - 1.0 - 2.0 * i as f64) / 2.0;
            a * a * cos
        })
        .collect();
    let off = (1..m).map(|i| (i as f64) * (m - i) as f64 / 2.0).collect();
    (diag, off)
}

/// First `k` Slepian tapers, ordered by decreasing spectral concentration,
/// unit norm, largest-magnitude entry positive.
pub fn dpss_tapers(m: usize, w: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    if !(w > 0.0 && w < 0.5) {
        return Err(Error::InvalidParameter(alloc::format!("half-bandwidth {w} outside (0, 0.5)")));
    }
    if k > m || m == 0 {
        return Err(Error::InvalidParameter(alloc::format!("{k} tapers of length {m}")));
    }
    let (diag, off) = dpss_tridiagonal(m, w);
    let (_, vectors) = sym_tridiag_eig(&diag, &off, k)?;
    Ok(vectors)
}
