//! Dense linear algebra used by every other module.
//!
//! Frame-sized problems stay small (`N <= 512`), so everything here is a
//! plain dense routine. A single symmetric eigendecomposition of `S = F Fᵀ`
//! serves least squares, whitening and conditioning diagnostics.

mod eigen;
mod matrix;


use alloc::vec::Vec;

pub use eigen::{fix_sign, sym_tridiag_eig, symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};
pub use matrix::{dot, norm2, Matrix};

use crate::{Error, Result};

/// Relative rank tolerance on `lambda_min / lambda_max`.
pub const RANK_TOLERANCE: f64 = 1e-12;
/// Largest tolerated asymmetry for "symmetric" inputs.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Extreme eigenvalues of a symmetric matrix and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `lambda_max / lambda_min`, or `+inf` when `lambda_min <= 0`.
    pub condition_number: f64,
}

impl SpectrumReport {
    fn from_values(values: &[f64]) -> Self {
        let lambda_min = values.first().copied().unwrap_or(0.0);
        let lambda_max = values.last().copied().unwrap_or(0.0);
        let condition_number =
            if lambda_min > 0.0 { lambda_max / lambda_min } else { f64::INFINITY };
        Self { lambda_min, lambda_max, condition_number }
    }
}

fn check_symmetric(s: &Matrix) -> Result<()> {
    if s.rows() != s.cols() {
        return Err(Error::DimensionMismatch { expected: (s.rows(), s.rows()), found: s.shape() });
    }
    let scale = s.max_abs().max(1.0);
    if s.asymmetry() > SYMMETRY_TOLERANCE * scale {
        return Err(Error::InvalidParameter(alloc::format!(
            "matrix not symmetric (asymmetry {:e})",
            s.asymmetry()
        )));
    }
    Ok(())
}

/// Eigenvalue extremes of a symmetric matrix.
pub fn spectrum(s: &Matrix) -> Result<SpectrumReport> {
    check_symmetric(s)?;
    Ok(SpectrumReport::from_values(&symmetric_eigenvalues(s)?))
}

fn check_rank(values: &[f64]) -> Result<()> {
    let report = SpectrumReport::from_values(values);
    if !(report.lambda_max > 0.0) || report.lambda_min <= RANK_TOLERANCE * report.lambda_max {
        return Err(Error::RankDeficient {
            lambda_min: report.lambda_min,
            lambda_max: report.lambda_max,
        });
    }
    Ok(())
}

/// `V diag(g(lambda)) Vᵀ`.
fn spectral_function(eig: &SymmetricEigen, g: impl Fn(f64) -> f64) -> Matrix {
    let n = eig.values.len();
    let v = &eig.vectors;
    let weights: Vec<f64> = eig.values.iter().map(|&l| g(l)).collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for (k, w) in weights.iter().enumerate() {
                acc += v[(i, k)] * w * v[(j, k)];
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc;
        }
    }
    out
}

/// Inverse of an SPD matrix through its eigendecomposition.
pub fn spd_inverse(s: &Matrix) -> Result<Matrix> {
    check_symmetric(s)?;
    let eig = symmetric_eigen(s)?;
    check_rank(&eig.values)?;
    Ok(spectral_function(&eig, |l| 1.0 / l))
}

/// Solves `min_X ||Y - X F||_F` for a full-row-rank `F`, returning
/// `X = Y Fᵀ (F Fᵀ)^{-1}`.
pub fn solve_row_lstsq(y: &Matrix, f: &Matrix) -> Result<Matrix> {
    if y.cols() != f.cols() {
        return Err(Error::DimensionMismatch { expected: (y.rows(), f.cols()), found: y.shape() });
    }
    let s = f.gram_rows();
    let s_inv = spd_inverse(&s)?;
    y.matmul_t(f)?.matmul(&s_inv)
}

/// Symmetric `M = S^{-1/2}` for an SPD `S`.
pub fn psd_inverse_sqrt(s: &Matrix) -> Result<Matrix> {
    check_symmetric(s)?;
    let eig = symmetric_eigen(s)?;
    let report = SpectrumReport::from_values(&eig.values);
    if report.lambda_min < -SYMMETRY_TOLERANCE * report.lambda_max.abs() {
        return Err(Error::NotPsd { eigenvalue: report.lambda_min });
    }
    check_rank(&eig.values)?;
    Ok(spectral_function(&eig, |l| 1.0 / libm::sqrt(l)))
}

/// Power iteration stopping rule and cap.
pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;

/// Largest singular value, by power iteration on the smaller Gram matrix.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    let gram = if m.rows() < m.cols() { m.gram_rows() } else { m.gram_cols() };
    let n = gram.rows();
    if n == 0 || gram.max_abs() == 0.0 {
        return Ok(0.0);
    }
    // Deterministic, generic start vector (golden-ratio sequence).
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + (i as f64 * 0.618_033_988_749_894_8) % 1.0)
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = gram.mul_vec(&v);
        let next = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        // Residual of the Rayleigh pair; small residual and stalled estimate
        // together mean convergence.
        let residual = w.iter().zip(&v).map(|(a, b)| (a - next * b) * (a - next * b)).sum::<f64>();
        let residual = libm::sqrt(residual);
        v = w.into_iter().map(|x| x / nw).collect();
        let stalled = (next - lambda).abs() <= POWER_TOLERANCE * next.abs();
        lambda = next;
        if stalled && residual <= 1e-6 * next.abs() {
            return Ok(libm::sqrt(lambda.max(0.0)));
        }
    }
    Err(Error::NoConvergence { iterations: POWER_MAX_ITER })
}

/// Largest singular value from a dense eigendecomposition of the smaller
/// Gram matrix. Slower than [`spectral_norm`] but accurate to rounding even
/// when the top singular values are clustered.
pub fn spectral_norm_dense(m: &Matrix) -> Result<f64> {
    let gram = if m.rows() < m.cols() { m.gram_rows() } else { m.gram_cols() };
    if gram.rows() == 0 {
        return Ok(0.0);
    }
    let values = symmetric_eigenvalues(&gram)?;
    Ok(libm::sqrt(values.last().copied().unwrap_or(0.0).max(0.0)))
}

/// Solves `A X = B` by LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot falls below `1e-12 * max|A|`.
pub fn lu_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch { expected: (n, n), found: a.shape() });
    }
    let tol = 1e-12 * a.max_abs();
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if lu[(r, col)].abs() > lu[(piv, col)].abs() {
                piv = r;
            }
        }
        if !(lu[(piv, col)].abs() > tol) {
            return Err(Error::Singular);
        }
        if piv != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..m {
                let t = x[(col, j)];
                x[(col, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let p = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / p;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                lu[(r, j)] -= factor * lu[(col, j)];
            }
            for j in 0..m {
                x[(r, j)] -= factor * x[(col, j)];
            }
        }
    }
    for col in (0..n).rev() {
        let p = lu[(col, col)];
        for j in 0..m {
            let mut acc = x[(col, j)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = acc / p;
        }
    }
    Ok(x)
}

/// Spectral radius estimate `||M^(2^k)||^(1/2^k)` by repeated squaring with
/// renormalization (Gelfand's formula), `k = 40`.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    let n = m.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let mut p = m.clone();
    let mut log_scale = 0.0;
    let mut exponent = 1.0;
    for _ in 0..40 {
        let nrm = p.frobenius_norm();
        if nrm == 0.0 {
            return Ok(0.0);
        }
        p = p.scale(1.0 / nrm);
        log_scale += libm::log(nrm) / exponent;
        p = p.matmul(&p)?;
        exponent *= 2.0;
    }
    let nrm = p.frobenius_norm();
    if nrm == 0.0 {
        return Ok(0.0);
    }
    Ok(libm::exp(log_scale + libm::log(nrm) / exponent))
}

/// Rescales each row of `m` by `factors[i]`.
pub fn scale_rows(m: &Matrix, factors: &[f64]) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * factors[i])
}

/// `M diag(factors)`.
pub fn scale_columns(m: &Matrix, factors: &[f64]) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * factors[j])
}


#[cfg(test)]
mod tests;
