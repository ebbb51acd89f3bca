//! Discretization, recurrences, convolution kernels, Jacobians and decoding.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::frames::FrameMatrix;
use crate::numerics::{lu_solve, spectral_radius, Matrix};
use crate::safari::{dual_frame, MeasureKind, SsmPair};
use crate::{Error, Result};

/// States above this magnitude are reported as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
/// Range of the log-uniform default step size.
pub const DELTA_RANGE: (f64, f64) = (0.001, 0.1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SteppingMode {
    /// Fixed `Δ`, time-invariant `(Ā, B̄)`.
    #[default]
    Lti,
    /// Step `k` uses `Δ_k = 1/(k+1)`, the `1/t` factor of the scaled measure.
    ScaledAdaptive,
}

/// `h_{k+1} = Ā h_k + B̄ u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSsm {
    abar: Matrix,
    bbar: Vec<f64>,
    c: Option<Matrix>,
    delta: f64,
    mode: SteppingMode,
    spectral_radius: f64,
    // Continuous pair, kept for adaptive stepping.
    a: Matrix,
    b: Vec<f64>,
}

impl DiscreteSsm {
    pub fn abar(&self) -> &Matrix {
        &self.abar
    }

    pub fn bbar(&self) -> &[f64] {
        &self.bbar
    }

    pub fn c(&self) -> Option<&Matrix> {
        self.c.as_ref()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mode(&self) -> SteppingMode {
        self.mode
    }

    /// Spectral radius of `Ā`.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn state_dim(&self) -> usize {
        self.bbar.len()
    }

    pub fn with_output(mut self, c: Matrix) -> Result<Self> {
        if c.cols() != self.state_dim() {
            return Err(Error::DimensionMismatch { expected: (c.rows(), self.state_dim()), found: c.shape() });
        }
        self.c = Some(c);
        Ok(self)
    }

    pub fn with_mode(mut self, mode: SteppingMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Bilinear map `(I + Δ/2 A)⁻¹ (I − Δ/2 A)`, `(I + Δ/2 A)⁻¹ Δ B`.
fn bilinear(a: &Matrix, b: &[f64], delta: f64) -> Result<(Matrix, Vec<f64>)> {
    let n = a.rows();
    let half = a.scale(0.5 * delta);
    let id = Matrix::identity(n);
    let resolvent = id.add(&half)?;
    let mut rhs = Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            rhs.row_mut(i)[j] = id[(i, j)] - half[(i, j)];
        }
        rhs.row_mut(i)[n] = delta * b[i];
    }
    let solved = lu_solve(&resolvent, &rhs)?;
    let abar = Matrix::from_fn(n, n, |i, j| solved[(i, j)]);
    let bbar = solved.column(n);
    Ok((abar, bbar))
}

/// Bilinear discretization in LTI mode. A translated pair is discretized as
/// `(A/θ, B/θ)` so that `Δ` is measured in the same units as `θ`.
pub fn bilinear_discretize(pair: &SsmPair, delta: f64) -> Result<DiscreteSsm> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("step size {delta} must be positive")));
    }
    let measure = pair.measure();
    let (a, b) = match measure.kind {
        MeasureKind::Scaled => (pair.a().clone(), pair.b().to_vec()),
        MeasureKind::Translated => {
            let inv = 1.0 / measure.theta;
            (pair.a().scale(inv), pair.b().iter().map(|v| v * inv).collect())
        }
    };
    let (abar, bbar) = bilinear(&a, &b, delta)?;
    let rho = spectral_radius(&abar)?;
    Ok(DiscreteSsm { abar, bbar, c: None, delta, mode: SteppingMode::Lti, spectral_radius: rho, a, b })
}

/// Log-uniform draw from [`DELTA_RANGE`].
pub fn default_delta(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let (lo, hi) = DELTA_RANGE;
    libm::exp(libm::log(lo) + u * (libm::log(hi) - libm::log(lo)))
}

/// States `h_1 … h_T` (one per row) and the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Matrix,
    pub final_state: Vec<f64>,
}

fn check_state(h: &[f64], step: usize) -> Result<()> {
    let magnitude = h.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) });
    if magnitude > DIVERGENCE_LIMIT {
        return Err(Error::Overflow { step, magnitude });
    }
    Ok(())
}

/// Runs the recurrence from `h0` (zero when `None`).
pub fn run(ssm: &DiscreteSsm, u: &[f64], h0: Option<&[f64]>) -> Result<Trajectory> {
    let n = ssm.state_dim();
    let mut h = match h0 {
        Some(h0) if h0.len() != n => {
            return Err(Error::DimensionMismatch { expected: (n, 1), found: (h0.len(), 1) })
        }
        Some(h0) => h0.to_vec(),
        None => vec![0.0; n],
    };
    let mut states = Matrix::zeros(u.len(), n);
    for (k, &uk) in u.iter().enumerate() {
        h = match ssm.mode {
            SteppingMode::Lti => {
                let mut next = ssm.abar.mul_vec(&h);
                next.iter_mut().zip(&ssm.bbar).for_each(|(x, b)| *x += b * uk);
                next
            }
            SteppingMode::ScaledAdaptive => {
                let (abar, bbar) = bilinear(&ssm.a, &ssm.b, 1.0 / (k + 1) as f64)?;
                let mut next = abar.mul_vec(&h);
                next.iter_mut().zip(&bbar).for_each(|(x, b)| *x += b * uk);
                next
            }
        };
        check_state(&h, k)?;
        states.row_mut(k).copy_from_slice(&h);
    }
    Ok(Trajectory { states, final_state: h })
}

/// `K[l] = C Āˡ B̄` for `l < T` (`C = I` when absent).
pub fn kernel(ssm: &DiscreteSsm, t: usize, c: Option<&Matrix>) -> Result<Vec<Vec<f64>>> {
    if t == 0 {
        return Err(Error::InvalidParameter("kernel length must be positive".into()));
    }
    let c = c.or(ssm.c.as_ref());
    if let Some(c) = c {
        if c.cols() != ssm.state_dim() {
            return Err(Error::DimensionMismatch { expected: (c.rows(), ssm.state_dim()), found: c.shape() });
        }
    }
    let mut v = ssm.bbar.clone();
    let mut out = Vec::with_capacity(t);
    for _ in 0..t {
        out.push(match c {
            Some(c) => c.mul_vec(&v),
            None => v.clone(),
        });
        v = ssm.abar.mul_vec(&v);
    }
    Ok(out)
}

/// `G = [Ā^{T-1} B̄, …, Ā B̄, B̄]`, shape `N × T`.
pub fn jacobian(ssm: &DiscreteSsm, t: usize) -> Result<Matrix> {
    if t == 0 {
        return Err(Error::InvalidParameter("sequence length must be positive".into()));
    }
    let mut g = Matrix::zeros(ssm.state_dim(), t);
    let mut v = ssm.bbar.clone();
    for col in (0..t).rev() {
        g.set_column(col, &v);
        if col > 0 {
            v = ssm.abar.mul_vec(&v);
        }
    }
    Ok(g)
}

/// Synthesizes the remembered signal from a state: `x̂ = Σ_n h_n φ̃_n / dt`,
/// with `φ̃ = S⁻¹F`. States hold `dt`-weighted inner products with the atoms,
/// hence the `1/dt`. The result lives on the frame grid, which the measure
/// maps to `[0, t]` (scaled) or `[t − θ, t]` (translated); see
/// [`decode_times`].
pub fn decode_state(h: &[f64], frame: &FrameMatrix) -> Result<Vec<f64>> {
    if h.len() != frame.n_atoms() {
        return Err(Error::DimensionMismatch { expected: (frame.n_atoms(), 1), found: (h.len(), 1) });
    }
    let dual = dual_frame(frame)?.matrix;
    let inv_dt = 1.0 / frame.grid().dt();
    Ok(dual.t_mul_vec(h).into_iter().map(|v| v * inv_dt).collect())
}

/// Absolute times of the decoded samples for a state taken at `end_time`.
pub fn decode_times(frame: &FrameMatrix, measure: crate::Measure, end_time: f64) -> Vec<f64> {
    let grid = frame.grid();
    (0..grid.len())
        .map(|i| match measure.kind {
            MeasureKind::Scaled => end_time * grid.point(i),
            MeasureKind::Translated => end_time - measure.theta + measure.theta * grid.point(i),
        })
        .collect()
}

/// Per-state receptive-field widths of a Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityProfile {
    /// Shortest contiguous run of time steps holding 90% of the row energy.
    pub widths: Vec<usize>,
    pub mean_width: f64,
}

/// Fraction of row energy a receptive field must hold.
pub const LOCALITY_FRACTION: f64 = 0.9;

pub fn locality_profile(g: &Matrix) -> LocalityProfile {
    let widths: Vec<usize> = (0..g.rows()).map(|r| energy_width(g.row(r), LOCALITY_FRACTION)).collect();
    let mean_width = if widths.is_empty() {
        0.0
    } else {
        widths.iter().sum::<usize>() as f64 / widths.len() as f64
    };
    LocalityProfile { widths, mean_width }
}

/// Length of the shortest window with at least `fraction` of `Σ x²`.
pub fn energy_width(row: &[f64], fraction: f64) -> usize {
    let mut prefix = Vec::with_capacity(row.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in row {
        acc += v * v;
        prefix.push(acc);
    }
    if acc == 0.0 {
        return 0;
    }
    let target = fraction * acc * (1.0 - 1e-12);
    let mut best = row.len();
    let mut lo = 0;
    for hi in 1..=row.len() {
        while lo < hi && prefix[hi] - prefix[lo + 1] >= target {
            lo += 1;
        }
        if prefix[hi] - prefix[lo] >= target {
            best = best.min(hi - lo);
        }
    }
    best
}

#[cfg(test)]
mod tests;
