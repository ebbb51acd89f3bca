//! Piecewise-constant test signals.

use alloc::vec::Vec;

use crate::frames::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SignalKind {
    /// `1` on `[1/2, 1]`.
    OneStep,
    /// `a₀, a₁, a₂` on `[0, t₁), [t₁, t₂), [t₂, 1]`.
    TwoStep,
    /// Any piecewise-constant signal.
    Custom,
}

/// A step function on `[0, 1]` and its right-continuous samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSignal {
    pub kind: SignalKind,
    /// Interior breakpoints, strictly increasing in `(0, 1)`.
    pub breakpoints: Vec<f64>,
    /// One amplitude per piece (`breakpoints.len() + 1`).
    pub amplitudes: Vec<f64>,
    pub samples: Vec<f64>,
    pub grid: Grid,
}

impl TestSignal {
    pub fn piecewise(kind: SignalKind, breakpoints: &[f64], amplitudes: &[f64], grid: Grid) -> Result<Self> {
        if amplitudes.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter("need one amplitude per piece".into()));
        }
        let ordered = breakpoints.windows(2).all(|w| w[0] < w[1]);
        let inside = breakpoints.iter().all(|b| *b > 0.0 && *b < 1.0);
        if !ordered || !inside {
            return Err(Error::InvalidParameter(alloc::format!("breakpoints {breakpoints:?} must increase inside (0, 1)")));
        }
        let samples = (0..grid.len())
            .map(|i| {
                let t = grid.point(i);
                amplitudes[breakpoints.iter().take_while(|b| t >= **b).count()]
            })
            .collect();
        Ok(Self { kind, breakpoints: breakpoints.to_vec(), amplitudes: amplitudes.to_vec(), samples, grid })
    }

    /// `1_{[1/2, 1]}`.
    pub fn one_step(grid: Grid) -> Self {
        Self::piecewise(SignalKind::OneStep, &[0.5], &[0.0, 1.0], grid).expect("valid breakpoints")
    }

    /// Two steps at `(1/3, 2/3)` with amplitudes `(0, 1, 0.3)`.
    pub fn two_step(grid: Grid) -> Self {
        Self::two_step_with(1.0 / 3.0, 2.0 / 3.0, [0.0, 1.0, 0.3], grid).expect("valid breakpoints")
    }

    pub fn two_step_with(t1: f64, t2: f64, amplitudes: [f64; 3], grid: Grid) -> Result<Self> {
        Self::piecewise(SignalKind::TwoStep, &[t1, t2], &amplitudes, grid)
    }

    /// `1_{[0, 1/2]}`, the step of the Legendre lower bound.
    pub fn star(grid: Grid) -> Self {
        Self::piecewise(SignalKind::Custom, &[0.5], &[1.0, 0.0], grid).expect("valid breakpoints")
    }

    /// Pieces as `(start, end, amplitude)`.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut edges = Vec::with_capacity(self.breakpoints.len() + 2);
        edges.push(0.0);
        edges.extend_from_slice(&self.breakpoints);
        edges.push(1.0);
        edges.windows(2).zip(&self.amplitudes).map(|(w, a)| (w[0], w[1], *a)).collect()
    }

    /// Exact `‖f‖_{L²(0,1)}`.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.pieces().iter().map(|(a, b, v)| (b - a) * v * v).sum())
    }
}
