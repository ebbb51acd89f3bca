//! Daubechies-6 filter bank and cascade sampling of its wavelet.

use alloc::vec;
use alloc::vec::Vec;

use super::wavelets::SampledPrototype;
use crate::{Error, Result};

/// Orthonormal db6 scaling (lowpass reconstruction) filter, 12 taps.
pub const DB6_LOWPASS: [f64; 12] = [
    0.111_540_743_350_109_46,
    0.494_623_890_398_453_1,
    0.751_133_908_021_095_4,
    0.315_250_351_709_197_6,
    -0.226_264_693_965_439_82,
    -0.129_766_867_567_261_94,
    0.097_501_605_587_323_05,
    0.027_522_865_530_305_73,
    -0.031_582_039_317_486_03,
    0.000_553_842_201_161_496_1,
    0.004_777_257_510_945_511,
    -0.001_077_301_085_308_479_6,
];

pub const DB6_LEN: usize = 12;
pub const DB6_VANISHING_MOMENTS: usize = 6;

/// Quadrature-mirror highpass `g_k = (-1)^k h_{11-k}`.
pub fn highpass() -> [f64; DB6_LEN] {
    let mut g = [0.0; DB6_LEN];
    for (k, gk) in g.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *gk = sign * DB6_LOWPASS[DB6_LEN - 1 - k];
    }
    g
}

/// Checks `Σh = √2`, double-shift orthonormality and the vanishing moments
/// of the highpass (moments taken about the filter center).
pub fn validated_filter() -> Result<[f64; DB6_LEN]> {
    let h = DB6_LOWPASS;
    let sum: f64 = h.iter().sum();
    if (sum - core::f64::consts::SQRT_2).abs() > 1e-10 {
        return Err(Error::FilterInvalid("lowpass sum differs from sqrt(2)"));
    }
    for m in 0..DB6_LEN / 2 {
        let acc: f64 = (0..DB6_LEN - 2 * m).map(|i| h[i] * h[i + 2 * m]).sum();
        let target = if m == 0 { 1.0 } else { 0.0 };
        if (acc - target).abs() > 1e-10 {
            return Err(Error::FilterInvalid("double-shift orthonormality fails"));
        }
    }
    let g = highpass();
    let center = (DB6_LEN - 1) as f64 / 2.0;
    for p in 0..DB6_VANISHING_MOMENTS {
        let moment: f64 = g
            .iter()
            .enumerate()
            .map(|(k, gk)| gk * libm::pow(k as f64 - center, p as f64))
            .sum();
        if moment.abs() > 1e-8 {
            return Err(Error::FilterInvalid("highpass vanishing moment fails"));
        }
    }
    Ok(h)
}

/// Scaling function and wavelet sampled on `x = j / 2^levels`.
#[derive(Debug, Clone)]
pub struct CascadeSamples {
    pub levels: usize,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl CascadeSamples {
    pub fn dx(&self) -> f64 {
        1.0 / (1u64 << self.levels) as f64
    }

    pub fn wavelet_prototype(&self) -> SampledPrototype {
        SampledPrototype { x0: 0.0, dx: self.dx(), values: self.psi.clone() }
    }
}

/// Upsample-by-two then convolve with `√2 · filter`.
fn cascade_step(current: &[f64], filter: &[f64]) -> Vec<f64> {
    let up_len = 2 * current.len() - 1;
    let mut out = vec![0.0; up_len + filter.len() - 1];
    for (i, &c) in current.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (k, &f) in filter.iter().enumerate() {
            out[2 * i + k] += core::f64::consts::SQRT_2 * f * c;
        }
    }
    out
}

/// Cascade algorithm: `levels` refinement steps starting from a unit impulse.
/// After `k` steps the support holds `(12 - 1)(2^k - 1) + 1` samples.
pub fn db6_samples(levels: usize) -> Result<CascadeSamples> {
    if levels < 4 {
        return Err(Error::InvalidParameter(alloc::format!("cascade levels {levels} < 4")));
    }
    let h = validated_filter()?;
    let g = highpass();
    let mut phi = vec![1.0];
    for _ in 0..levels - 1 {
        phi = cascade_step(&phi, &h);
    }
    let psi = cascade_step(&phi, &g);
    let phi = cascade_step(&phi, &h);
    Ok(CascadeSamples { levels, phi, psi })
}
