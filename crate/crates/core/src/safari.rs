//! Continuous-time `(A, B)` from a discretized frame.
//!
//! Both measures reduce to the row least-squares projection
//! `X = Y Fᵀ (F Fᵀ)⁻¹` of some derivative image `Y` of the frame onto the
//! frame itself. The scaled measure uses `Y = t·Ḟ` and adds the identity; the
//! translated measure uses `Y = Ḟ` and adds the rank-one boundary term
//! `Q = φ(0) φ̃(0)ᵀ`. `A` is returned with the sign it has in
//! `ḣ = -(1/t) A h + (1/t) B u` (resp. `1/θ`).

use alloc::vec::Vec;

use crate::frames::FrameMatrix;
use crate::numerics::{self, solve_row_lstsq, spectral_norm_dense, spd_inverse, Matrix};
use crate::{Error, Result};

/// Relative slack on the projection bound.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MeasureKind {
    Scaled,
    Translated,
}

/// Weighting of the history being projected.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Measure {
    pub kind: MeasureKind,
    /// Window length of the translated measure; ignored when scaled.
    pub theta: f64,
}

impl Measure {
    pub fn scaled() -> Self {
        Self { kind: MeasureKind::Scaled, theta: 1.0 }
    }

    pub fn translated(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("window length {theta} must be positive")));
        }
        Ok(Self { kind: MeasureKind::Translated, theta })
    }
}

/// Continuous-time dynamics derived from a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SsmPair {
    a: Matrix,
    b: Vec<f64>,
    measure: Measure,
    source_frame_id: u64,
}

impl SsmPair {
    pub fn from_parts(a: Matrix, b: Vec<f64>, measure: Measure, source_frame_id: u64) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n || b.len() != n {
            return Err(Error::DimensionMismatch { expected: (n, n), found: (a.cols(), b.len()) });
        }
        if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("state matrices must be finite".into()));
        }
        Ok(Self { a, b, measure, source_frame_id })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// Fingerprint of the frame the pair was derived from.
    pub fn source_frame_id(&self) -> u64 {
        self.source_frame_id
    }

    pub fn state_dim(&self) -> usize {
        self.b.len()
    }
}

/// `F̃ = S⁻¹ F`, the canonical dual under the Euclidean product.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFrame {
    pub matrix: Matrix,
}

/// Row derivatives `d/dt` on the unit interval: the frame's closed form if it
/// has one, otherwise second-order differences (one-sided at the ends).
pub fn row_derivative(frame: &FrameMatrix) -> Matrix {
    match frame.analytic_derivative() {
        Some(d) => d.clone(),
        None => finite_difference(frame.matrix(), frame.grid().dt()),
    }
}

/// Second-order accurate row derivative of samples spaced `dt` apart.
pub fn finite_difference(m: &Matrix, dt: f64) -> Matrix {
    let (rows, l) = m.shape();
    let mut out = Matrix::zeros(rows, l);
    if l < 3 {
        return out;
    }
    let h = 0.5 / dt;
    for r in 0..rows {
        let f = m.row(r);
        let d = out.row_mut(r);
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * h;
        for i in 1..l - 1 {
            d[i] = (f[i + 1] - f[i - 1]) * h;
        }
        d[l - 1] = (3.0 * f[l - 1] - 4.0 * f[l - 2] + f[l - 3]) * h;
    }
    out
}

pub fn dual_frame(frame: &FrameMatrix) -> Result<DualFrame> {
    let s_inv = spd_inverse(&frame.frame_operator())?;
    Ok(DualFrame { matrix: s_inv.matmul(frame.matrix())? })
}

/// Dual under the quadrature inner product of `L²(0,1)`: rows `φ̃_m` with
/// `∫ φ_n φ̃_m = δ_nm`.
pub fn l2_dual(frame: &FrameMatrix) -> Result<Matrix> {
    let w = frame.grid().quadrature_weights();
    let weighted = numerics::scale_columns(frame.matrix(), &w);
    let mut s = weighted.matmul_t(frame.matrix())?;
    s.symmetrize();
    spd_inverse(&s)?.matmul(frame.matrix())
}

/// `X = Ḟ Fᵀ S⁻¹`, checked against `‖X‖₂ ≤ ‖Ḟ Fᵀ‖₂ / λ_min(S)`.
pub fn lemma1_project(fdot: &Matrix, f: &Matrix) -> Result<Matrix> {
    let x = solve_row_lstsq(fdot, f)?;
    let (norm, bound) = lemma1_norms(fdot, f, &x)?;
    if norm > bound * (1.0 + BOUND_SLACK) {
        return Err(Error::BoundViolated { norm, bound });
    }
    Ok(x)
}

/// `(‖X‖₂, ‖Ḟ Fᵀ‖₂ / λ_min(S))` for a computed projection `X`.
pub fn lemma1_norms(fdot: &Matrix, f: &Matrix, x: &Matrix) -> Result<(f64, f64)> {
    let report = numerics::spectrum(&f.gram_rows())?;
    let cross = spectral_norm_dense(&fdot.matmul_t(f)?)?;
    Ok((spectral_norm_dense(x)?, cross / report.lambda_min))
}

fn last_column(f: &Matrix) -> Vec<f64> {
    f.column(f.cols() - 1)
}

/// Scaled measure: `A = I + X(t·Ḟ)`, `B_n = φ_n(1)`.
pub fn derive_scaled(frame: &FrameMatrix) -> Result<SsmPair> {
    let f = frame.matrix();
    let grid = frame.grid();
    let mut upsilon = row_derivative(frame);
    for r in 0..upsilon.rows() {
        for (i, v) in upsilon.row_mut(r).iter_mut().enumerate() {
            *v *= grid.point(i);
        }
    }
    let x = lemma1_project(&upsilon, f)?;
    let a = x.add(&Matrix::identity(f.rows()))?;
    SsmPair::from_parts(a, last_column(f), Measure::scaled(), frame.fingerprint())
}

/// Translated measure: `A = X(Ḟ) + φ(0) φ̃(0)ᵀ`, `B_n = φ_n(1)`, where `φ̃`
/// is the `L²(0,1)` dual.
pub fn derive_translated(frame: &FrameMatrix, theta: f64) -> Result<SsmPair> {
    let measure = Measure::translated(theta)?;
    let f = frame.matrix();
    let x = lemma1_project(&row_derivative(frame), f)?;
    let dual = l2_dual(frame)?;
    let head = f.column(0);
    let dual_head = dual.column(0);
    let q = Matrix::from_fn(f.rows(), f.rows(), |n, m| head[n] * dual_head[m]);
    let a = x.add(&q)?;
    SsmPair::from_parts(a, last_column(f), measure, frame.fingerprint())
}

/// Closed-form HiPPO-LegS pair of size `n`.
pub fn legs_oracle(n: usize) -> SsmPair {
    let root = |k: usize| libm::sqrt((2 * k + 1) as f64);
    let a = Matrix::from_fn(n, n, |i, k| match i.cmp(&k) {
        core::cmp::Ordering::Greater => root(i) * root(k),
        core::cmp::Ordering::Equal => (i + 1) as f64,
        core::cmp::Ordering::Less => 0.0,
    });
    let b = (0..n).map(root).collect();
    SsmPair { a, b, measure: Measure::scaled(), source_frame_id: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{build_frame, tighten, Family, FrameSpec, Normalization};
    use alloc::vec;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| uniform(&mut rng))
    }

    fn legendre(n: usize, l: usize) -> FrameMatrix {
        build_frame(&FrameSpec::new(Family::Legendre, n, l).with_normalization(Normalization::Native)).unwrap()
    }

    #[test]
    fn finite_difference_of_sine() {
        let l = 2048;
        let grid = crate::Grid::new(l).unwrap();
        let tau = core::f64::consts::TAU;
        let m = Matrix::from_fn(2, l, |r, i| if r == 0 { 3.0 } else { libm::sin(tau * grid.point(i)) });
        let d = finite_difference(&m, grid.dt());
        assert!(d.row(0).iter().all(|v| *v == 0.0));
        let err = (0..l).map(|i| (d[(1, i)] - tau * libm::cos(tau * grid.point(i))).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-4, "{err}");
    }

    #[test]
    fn projection_edge_cases() {
        let f = random_matrix(3, 11, 2);
        let zero = lemma1_project(&Matrix::zeros(3, 11), &f).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let id = lemma1_project(&f, &f).unwrap();
        assert!(id.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn projection_matches_explicit_formula() {
        let f = random_matrix(5, 17, 3);
        let y = random_matrix(5, 17, 4);
        let x = lemma1_project(&y, &f).unwrap();
        let s = f.gram_rows();
        let oracle = numerics::lu_solve(&s, &f.matmul_t(&y).unwrap()).unwrap().transpose();
        assert!(x.sub(&oracle).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn dual_of_scaled_orthonormal_rows() {
        let base = tighten(&legendre(4, 64)).unwrap();
        let scales = [1.0, 2.0, 0.5, 4.0];
        let scaled = numerics::scale_rows(base.matrix(), &scales);
        let frame =
            FrameMatrix::from_parts(scaled, base.spec().clone(), base.atoms().to_vec(), false, false, None).unwrap();
        let dual = dual_frame(&frame).unwrap().matrix;
        for (r, c) in scales.iter().enumerate() {
            for i in 0..64 {
                assert!((dual[(r, i)] - base.matrix()[(r, i)] / c).abs() < 1e-10);
            }
        }
        let fd = frame.matrix().matmul_t(&dual).unwrap();
        assert!(fd.sub(&Matrix::identity(4)).unwrap().frobenius_norm() < 1e-8);
    }

    #[test]
    fn dual_of_tight_frame_is_itself() {
        let tight = tighten(&build_frame(&FrameSpec::new(Family::Morlet, 16, 256)).unwrap()).unwrap();
        let dual = dual_frame(&tight).unwrap().matrix;
        assert!(dual.sub(tight.matrix()).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn dual_reconstructs_row_span() {
        let f = random_matrix(8, 64, 9);
        let spec = FrameSpec::new(Family::Morlet, 8, 64);
        let atoms = vec![crate::frames::AtomInfo { scale: 1.0, center: 0.5, modulation: None, taper_order: None }; 8];
        let frame = FrameMatrix::from_parts(f.clone(), spec, atoms, false, false, None).unwrap();
        let dual = dual_frame(&frame).unwrap().matrix;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let x: Vec<f64> = (0..8).map(|_| uniform(&mut rng)).collect();
            let signal = f.t_mul_vec(&x);
            let coeffs = dual.mul_vec(&signal);
            let back = f.t_mul_vec(&coeffs);
            let err = back.iter().zip(&signal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-8);
        }
    }

    #[test]
    fn legs_oracle_small_cases() {
        let one = legs_oracle(1);
        assert_eq!(one.a()[(0, 0)], 1.0);
        assert_eq!(one.b(), &[1.0]);
        let two = legs_oracle(2);
        let r3 = 3f64.sqrt();
        assert_eq!(two.a().as_slice(), &[1.0, 0.0, r3, 2.0]);
        assert_eq!(two.b(), &[1.0, r3]);
    }

    #[test]
    fn scaled_legendre_recovers_legs() {
        let pair = derive_scaled(&legendre(4, 8192)).unwrap();
        let oracle = legs_oracle(4);
        assert!(pair.a().sub(oracle.a()).unwrap().max_abs() <= 1e-6);
        for (b, o) in pair.b().iter().zip(oracle.b()) {
            assert!((b - o).abs() <= 1e-8);
        }
    }

    #[test]
    fn constant_atom() {
        let frame = legendre(1, 128);
        let scaled = derive_scaled(&frame).unwrap();
        assert!((scaled.a()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((scaled.b()[0] - 1.0).abs() < 1e-12);
        let translated = derive_translated(&frame, 1.0).unwrap();
        assert!((translated.a()[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(translated.measure().kind, MeasureKind::Translated);
    }

    #[test]
    fn interior_atoms_have_negligible_boundary_term() {
        let mut spec = FrameSpec::new(Family::Morlet, 3, 1024);
        spec.n_scales = 1;
        spec.f_min = 40.0;
        spec.f_max = 41.0;
        let frame = build_frame(&spec).unwrap();
        // Keep only the center atom, which vanishes at both ends.
        let row = frame.matrix().row(1).to_vec();
        assert!(row[0].abs() <= 1e-12);
        let single = FrameMatrix::from_parts(
            Matrix::from_rows(&[row.clone()]).unwrap(),
            frame.spec().clone(),
            frame.atoms()[1..2].to_vec(),
            true,
            false,
            Some(Matrix::from_rows(&[frame.analytic_derivative().unwrap().row(1).to_vec()]).unwrap()),
        )
        .unwrap();
        let translated = derive_translated(&single, 1.0).unwrap();
        let projected = lemma1_project(&row_derivative(&single), single.matrix()).unwrap();
        assert!((translated.a()[(0, 0)] - projected[(0, 0)]).abs() <= 1e-10);
    }

    #[test]
    fn translated_rejects_bad_window() {
        assert!(derive_translated(&legendre(2, 32), 0.0).is_err());
    }

    #[test]
    fn bound_holds_for_wavelet_frames() {
        for family in Family::WAVELETS {
            let frame = build_frame(&FrameSpec::new(family, 16, 512)).unwrap();
            for f in [frame.clone(), tighten(&frame).unwrap()] {
                derive_scaled(&f).unwrap();
                derive_translated(&f, 1.0).unwrap();
            }
        }
    }
}
