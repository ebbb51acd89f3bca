use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::*;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, cols, |_, _| uniform(&mut rng))
}

fn random_spd(n: usize, seed: u64) -> Matrix {
    let g = random_matrix(n, n, seed);
    g.matmul_t(&g).unwrap().add(&Matrix::identity(n)).unwrap()
}

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

#[test]
fn lstsq_of_frame_onto_itself_is_identity() {
    let f = random_matrix(4, 9, 1);
    let x = solve_row_lstsq(&f, &f).unwrap();
    assert!(max_abs_diff(&x, &Matrix::identity(4)) < 1e-12);
}

#[test]
fn lstsq_with_orthonormal_rows_is_plain_product() {
    // Rows of a rotation restricted to 2 of 3 coordinates.
    let c = libm::cos(0.3);
    let s = libm::sin(0.3);
    let f = Matrix::from_rows(&[vec![c, s, 0.0], vec![-s, c, 0.0]]).unwrap();
    let y = random_matrix(3, 3, 2);
    let x = solve_row_lstsq(&y, &f).unwrap();
    let expected = y.matmul_t(&f).unwrap();
    assert!(max_abs_diff(&x, &expected) < 1e-12);
}

#[test]
fn lstsq_matches_normal_equations_oracle() {
    let f = random_matrix(3, 5, 3);
    let y = random_matrix(3, 5, 4);
    let x = solve_row_lstsq(&y, &f).unwrap();
    // X S = Y Fᵀ  <=>  S Xᵀ = F Yᵀ, solved by LU.
    let s = f.matmul_t(&f).unwrap();
    let rhs = f.matmul_t(&y).unwrap();
    let oracle = lu_solve(&s, &rhs).unwrap().transpose();
    assert!(max_abs_diff(&x, &oracle) < 1e-10);
}

#[test]
fn lstsq_rejects_rank_deficient_frames() {
    let f = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
    assert!(matches!(solve_row_lstsq(&f, &f), Err(Error::RankDeficient { .. })));
}

#[test]
fn inverse_sqrt_of_simple_matrices() {
    let m = psd_inverse_sqrt(&Matrix::identity(3)).unwrap();
    assert!(max_abs_diff(&m, &Matrix::identity(3)) < 1e-14);
    let m = psd_inverse_sqrt(&Matrix::from_diag(&[4.0, 9.0])).unwrap();
    assert!(max_abs_diff(&m, &Matrix::from_diag(&[0.5, 1.0 / 3.0])) < 1e-14);
}

#[test]
fn inverse_sqrt_whitens_random_spd() {
    for seed in 0..5 {
        let s = random_spd(12, 10 + seed);
        let m = psd_inverse_sqrt(&s).unwrap();
        let msm = m.matmul(&s).unwrap().matmul(&m).unwrap();
        let resid = msm.sub(&Matrix::identity(12)).unwrap().frobenius_norm();
        assert!(resid <= 1e-8, "residual {resid}");
        assert_eq!(m.asymmetry(), 0.0);
    }
}

#[test]
fn inverse_sqrt_rejects_indefinite() {
    let s = Matrix::from_diag(&[1.0, -0.5]);
    assert!(matches!(psd_inverse_sqrt(&s), Err(Error::NotPsd { .. })));
    let s = Matrix::from_diag(&[1.0, 0.0]);
    assert!(matches!(psd_inverse_sqrt(&s), Err(Error::RankDeficient { .. })));
}

#[test]
fn spectrum_of_diagonal_matrices() {
    let r = spectrum(&Matrix::identity(5)).unwrap();
    assert_eq!((r.lambda_min, r.lambda_max), (1.0, 1.0));
    assert!((r.condition_number - 1.0).abs() < 1e-15);
    let r = spectrum(&Matrix::from_diag(&[1.0, 100.0])).unwrap();
    assert!((r.lambda_min - 1.0).abs() < 1e-13);
    assert!((r.lambda_max - 100.0).abs() < 1e-12);
    assert!((r.condition_number - 100.0).abs() < 1e-10);
    let r = spectrum(&Matrix::from_diag(&[-1.0, 2.0])).unwrap();
    assert!(r.condition_number.is_infinite());
}

#[test]
fn spectrum_sandwiches_rayleigh_quotients() {
    let s = random_spd(10, 77);
    let r = spectrum(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..100 {
        let x: Vec<f64> = (0..10).map(|_| uniform(&mut rng)).collect();
        let q = dot(&x, &s.mul_vec(&x)) / dot(&x, &x);
        assert!(r.lambda_min - 1e-12 <= q && q <= r.lambda_max + 1e-12);
    }
}

#[test]
fn eigenvectors_reconstruct_matrix() {
    let s = random_spd(9, 5);
    let eig = symmetric_eigen(&s).unwrap();
    let v = &eig.vectors;
    let lam = Matrix::from_diag(&eig.values);
    let back = v.matmul(&lam).unwrap().matmul(&v.transpose()).unwrap();
    assert!(max_abs_diff(&back, &s) < 1e-12);
    let vtv = v.transpose().matmul(v).unwrap();
    assert!(max_abs_diff(&vtv, &Matrix::identity(9)) < 1e-13);
}

#[test]
fn spectral_norm_simple_cases() {
    assert_eq!(spectral_norm(&Matrix::zeros(3, 4)).unwrap(), 0.0);
    let n = spectral_norm(&Matrix::from_diag(&[3.0, -7.0])).unwrap();
    assert!((n - 7.0).abs() < 1e-9);
}

#[test]
fn spectral_norm_matches_svd_oracle() {
    for seed in 0..5 {
        let m = random_matrix(4, 6, 100 + seed);
        let oracle = libm::sqrt(*symmetric_eigenvalues(&m.gram_rows()).unwrap().last().unwrap());
        let got = spectral_norm(&m).unwrap();
        assert!((got - oracle).abs() <= 1e-8 * oracle, "{got} vs {oracle}");
        // Never below any probe ratio.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let x: Vec<f64> = (0..6).map(|_| uniform(&mut rng)).collect();
            assert!(norm2(&m.mul_vec(&x)) / norm2(&x) <= got * (1.0 + 1e-10));
        }
    }
}

#[test]
fn tridiagonal_two_by_two() {
    let (vals, vecs) = sym_tridiag_eig(&[2.0, 2.0], &[1.0], 2).unwrap();
    assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    assert!((vecs[0][0] - r).abs() < 1e-14 && (vecs[0][1] - r).abs() < 1e-14);
    // Largest-magnitude entry positive: first entry on the tie.
    assert!((vecs[1][0] - r).abs() < 1e-14 && (vecs[1][1] + r).abs() < 1e-14);
}

#[test]
fn tridiagonal_identity() {
    let (vals, _) = sym_tridiag_eig(&[1.0, 1.0, 1.0], &[0.0, 0.0], 3).unwrap();
    assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-15));
}

fn check_tridiagonal_against_dense(m: usize, k: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..m).map(|_| uniform(&mut rng) * 3.0).collect();
    let off: Vec<f64> = (0..m - 1).map(|_| uniform(&mut rng)).collect();
    let dense = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let oracle = symmetric_eigen(&dense).unwrap();
    let (vals, vecs) = sym_tridiag_eig(&diag, &off, k).unwrap();
    for (idx, (val, vec)) in vals.iter().zip(&vecs).enumerate() {
        let o = m - 1 - idx;
        assert!((val - oracle.values[o]).abs() < 1e-10);
        let mut col = oracle.vectors.column(o);
        fix_sign(&mut col);
        let diff: f64 = col.iter().zip(vec).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "eigvec {idx} diff {diff}");
    }
}

#[test]
fn tridiagonal_matches_dense_solver() {
    check_tridiagonal_against_dense(8, 8, 9);
}

#[test]
fn tridiagonal_inverse_iteration_path() {
    // Sizes above the dense limit take the inverse-iteration path.
    check_tridiagonal_against_dense(300, 4, 10);
}

#[test]
fn lu_detects_singular_systems() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert!(matches!(lu_solve(&a, &Matrix::identity(2)), Err(Error::Singular)));
}

#[test]
fn spectral_radius_of_rotation_and_diagonal() {
    let r = spectral_radius(&Matrix::from_diag(&[0.5, -0.9])).unwrap();
    assert!((r - 0.9).abs() < 1e-9);
    let c = libm::cos(1.0);
    let s = libm::sin(1.0);
    let rot = Matrix::from_rows(&[vec![0.8 * c, -0.8 * s], vec![0.8 * s, 0.8 * c]]).unwrap();
    assert!((spectral_radius(&rot).unwrap() - 0.8).abs() < 1e-9);
}

mod props {
    use proptest::prelude::*;

    use super::super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normal_equation_holds(seed in 0u64..10_000, n in 1usize..6, extra in 1usize..8) {
            let f = super::random_matrix(n, n + extra, seed);
            let y = super::random_matrix(n, n + extra, seed ^ 0xABCD);
            let x = solve_row_lstsq(&y, &f).unwrap();
            let s = f.gram_rows();
            let lhs = x.matmul(&s).unwrap();
            let rhs = y.matmul_t(&f).unwrap();
            let rel = lhs.sub(&rhs).unwrap().frobenius_norm() / rhs.frobenius_norm().max(1e-300);
            prop_assert!(rel <= 1e-8, "relative residual {rel}");
        }

        #[test]
        fn whitening_residual(seed in 0u64..10_000, n in 1usize..10) {
            let s = super::random_spd(n, seed);
            let m = psd_inverse_sqrt(&s).unwrap();
            prop_assert_eq!(m.asymmetry(), 0.0);
            let r = m.matmul(&s).unwrap().matmul(&m).unwrap().sub(&Matrix::identity(n)).unwrap();
            prop_assert!(r.frobenius_norm() <= 1e-8);
        }
    }
}
