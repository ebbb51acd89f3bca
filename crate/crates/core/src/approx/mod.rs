//! Nonlinear N-term approximation of step signals: Legendre best-N-term,
//! db6 DWT hard thresholding and OMP over a redundant wavelet dictionary.

mod dwt;
mod legendre;
mod omp;
mod signals;

use alloc::vec;
use alloc::vec::Vec;

pub use dwt::{dwt_db6, Direction};
pub use legendre::{gauss_legendre, legendre_at_zero, legendre_project, legendre_rows, step_coeff_closed_form, MAX_CEILING};
pub use omp::{build_cwt_dictionary, omp_ridge, CwtParams, Dictionary, DictionaryAtom, OmpResult, DEFAULT_RIDGE};
pub use signals::{SignalKind, TestSignal};

use crate::frames::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    LegendreBestN,
    DwtThreshold,
    Omp,
}

/// Outcome of one N-term approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxReport {
    pub method: Method,
    pub budget: usize,
    pub selected: Vec<usize>,
    /// Discrete `L²` error against the sampled signal.
    pub error: f64,
    pub approximation: Vec<f64>,
}

/// `(dt Σ |f - g|²)^{1/2}`.
pub fn error_l2(f: &[f64], g: &[f64], grid: Grid) -> Result<f64> {
    if f.len() != g.len() || f.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: (grid.len(), 1), found: (f.len(), g.len()) });
    }
    let sum: f64 = f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(libm::sqrt(grid.dt() * sum))
}

/// Indices of the `n` largest magnitudes, lower index first on ties,
/// returned in ascending order.
pub fn largest_indices(values: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    order.truncate(n);
    order.sort_unstable();
    order
}

/// Keeps the `n` largest coefficients and synthesizes `Σ_{Γ} a_n · basis_n`,
/// where `basis(n)` returns the samples of atom `n` on the grid.
pub fn best_n_term(
    coeffs: &[f64],
    n: usize,
    basis: impl Fn(&[usize]) -> Vec<Vec<f64>>,
    signal: &[f64],
    grid: Grid,
) -> Result<ApproxReport> {
    let selected = largest_indices(coeffs, n);
    let mut approximation = vec![0.0; grid.len()];
    for (row, &idx) in basis(&selected).iter().zip(&selected) {
        for (x, v) in approximation.iter_mut().zip(row) {
            *x += coeffs[idx] * v;
        }
    }
    let error = error_l2(signal, &approximation, grid)?;
    Ok(ApproxReport { method: Method::LegendreBestN, budget: n, selected, error, approximation })
}

/// Legendre best-N-term of a step signal from its first `ceiling`
/// coefficients.
pub fn legendre_best_n(signal: &TestSignal, n: usize, coeffs: &[f64]) -> Result<ApproxReport> {
    let grid = signal.grid;
    best_n_term(coeffs, n, |degrees| legendre_rows(degrees, grid), &signal.samples, grid)
}

/// Hard thresholding in the periodized db6 basis: keep the `n` largest
/// coefficients and invert.
pub fn dwt_threshold_n(signal: &[f64], n: usize, levels: usize, grid: Grid) -> Result<ApproxReport> {
    let coeffs = dwt_db6(signal, levels, Direction::Forward)?;
    let selected = largest_indices(&coeffs, n);
    let mut kept = vec![0.0; coeffs.len()];
    for &i in &selected {
        kept[i] = coeffs[i];
    }
    let approximation = dwt_db6(&kept, levels, Direction::Inverse)?;
    let error = error_l2(signal, &approximation, grid)?;
    Ok(ApproxReport { method: Method::DwtThreshold, budget: n, selected, error, approximation })
}

/// Deepest decomposition whose coarsest band still holds a full filter.
pub fn default_levels(len: usize) -> usize {
    let mut levels = 0;
    while len % (1 << (levels + 1)) == 0 && (len >> (levels + 1)) >= crate::frames::db6::DB6_LEN {
        levels += 1;
    }
    levels.max(1)
}

/// OMP with ridge refit, as an [`ApproxReport`].
pub fn omp_approx(dictionary: &Dictionary, signal: &[f64], n: usize, ridge: f64) -> Result<ApproxReport> {
    let result = omp_ridge(dictionary, signal, n, ridge)?;
    let error = error_l2(signal, &result.approximation, dictionary.grid)?;
    Ok(ApproxReport { method: Method::Omp, budget: n, selected: result.selected, error, approximation: result.approximation })
}

/// Least-squares slope of `log error` against `log N`.
pub fn rate_slope(budgets: &[usize], errors: &[f64]) -> Result<f64> {
    if budgets.len() != errors.len() || budgets.len() < 3 {
        return Err(Error::InvalidParameter("rate slope needs at least three (N, error) pairs".into()));
    }
    if let Some(i) = errors.iter().position(|e| *e == 0.0) {
        return Err(Error::ZeroError { budget: budgets[i] });
    }
    if budgets.iter().any(|b| *b == 0) || errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("budgets and errors must be positive".into()));
    }
    let xs: Vec<f64> = budgets.iter().map(|b| libm::log(*b as f64)).collect();
    let ys: Vec<f64> = errors.iter().map(|e| libm::log(*e)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests;
