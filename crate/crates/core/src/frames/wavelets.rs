//! Continuous mother wavelets (Morlet, Gaussian derivatives) and the
//! prototype measurements used by the frame recipe: central frequency
//! (peak of the energy spectrum) and energy-weighted time spread.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Modulation of the Morlet prototype `exp(-x²/2) cos(ω₀ x)`.
pub const MORLET_OMEGA0: f64 = 5.0;

/// Analytic mother wavelet in its own coordinate `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mother {
    Morlet { omega0: f64 },
    /// `d^P/dx^P exp(-x²/2)`.
    GaussDeriv { order: u32 },
}

/// Probabilists' Hermite polynomial `He_n(x)`.
pub fn hermite_he(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^P/dx^P exp(-x²/2) = (-1)^P He_P(x) exp(-x²/2)`.
pub fn gaussian_derivative(order: u32, x: f64) -> f64 {
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    sign * hermite_he(order, x) * libm::exp(-0.5 * x * x)
}

impl Mother {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Mother::Morlet { omega0 } => libm::exp(-0.5 * x * x) * libm::cos(omega0 * x),
            Mother::GaussDeriv { order } => gaussian_derivative(order, x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Mother::Morlet { omega0 } => {
                let env = libm::exp(-0.5 * x * x);
                -x * env * libm::cos(omega0 * x) - omega0 * env * libm::sin(omega0 * x)
            }
            Mother::GaussDeriv { order } => gaussian_derivative(order + 1, x),
        }
    }

    /// Samples on `[-R, R]`, beyond which the Gaussian envelope is below 1e-30.
    pub fn prototype(&self) -> SampledPrototype {
        const R: f64 = 12.0;
        const DX: f64 = 0.005;
        let n = (2.0 * R / DX) as usize + 1;
        let values = (0..n).map(|i| self.eval(-R + i as f64 * DX)).collect();
        SampledPrototype { x0: -R, dx: DX, values }
    }
}

/// Prototype waveform sampled on `x0 + i dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPrototype {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl SampledPrototype {
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// `|Σ_j ψ_j e^{-2πi f x_j}|²`.
    pub fn energy_spectrum(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in self.values.iter().enumerate() {
            let (s, c) = libm::sincos(w * self.x(i));
            re += v * c;
            im -= v * s;
        }
        (re * re + im * im) * self.dx * self.dx
    }

    /// Frequency (cycles per unit `x`) maximizing the energy spectrum:
    /// coarse scan then golden-section refinement.
    pub fn central_frequency(&self) -> f64 {
        let f_hi = 0.25 / self.dx;
        let scan = 2000usize;
        let step = f_hi / scan as f64;
        let mut best = 1usize;
        let mut best_val = f64::NEG_INFINITY;
        for k in 1..=scan {
            let v = self.energy_spectrum(k as f64 * step);
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        let mut a = (best as f64 - 1.0) * step;
        let mut b = (best as f64 + 1.0) * step;
        let invphi = (libm::sqrt(5.0) - 1.0) / 2.0;
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let mut fc = self.energy_spectrum(c);
        let mut fd = self.energy_spectrum(d);
        while b - a > 1e-12 * (1.0 + a.abs()) {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = self.energy_spectrum(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = self.energy_spectrum(d);
            }
        }
        0.5 * (a + b)
    }

    /// Energy centroid `∫ x ψ² / ∫ ψ²`.
    pub fn energy_center(&self) -> f64 {
        let (mut m0, mut m1) = (0.0, 0.0);
        for (i, &v) in self.values.iter().enumerate() {
            let e = v * v;
            m0 += e;
            m1 += e * self.x(i);
        }
        m1 / m0
    }

    /// Energy-weighted standard deviation around the centroid.
    pub fn time_spread(&self) -> f64 {
        let c = self.energy_center();
        let (mut m0, mut m2) = (0.0, 0.0);
        for (i, &v) in self.values.iter().enumerate() {
            let e = v * v;
            let d = self.x(i) - c;
            m0 += e;
            m2 += e * d * d;
        }
        libm::sqrt(m2 / m0)
    }

    /// Linear interpolation, zero outside the sampled support.
    pub fn interpolate(&self, x: f64) -> f64 {
        let pos = (x - self.x0) / self.dx;
        if pos < 0.0 || pos > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = libm::floor(pos) as usize;
        if i + 1 >= self.values.len() {
            return self.values[self.values.len() - 1];
        }
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}
