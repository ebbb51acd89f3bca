use super::*;
use alloc::vec;

#[test]
fn error_metric() {
    let grid = Grid::new(5).unwrap();
    let f = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(error_l2(&f, &f, grid).unwrap(), 0.0);
    let g = [0.0; 5];
    let e = error_l2(&f, &g, grid).unwrap();
    let cf: Vec<f64> = f.iter().map(|v| -3.0 * v).collect();
    assert!((error_l2(&cf, &g, grid).unwrap() - 3.0 * e).abs() < 1e-12);
    for l in [1001, 4096] {
        let grid = Grid::new(l).unwrap();
        let one = TestSignal::one_step(grid);
        let e = error_l2(&one.samples, &vec![0.0; l], grid).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() <= 2.0 / l as f64);
    }
}

#[test]
fn slope_cases() {
    assert!((rate_slope(&[1, 2, 4], &[1.0, 0.5, 0.25]).unwrap() + 1.0).abs() < 1e-12);
    assert!(rate_slope(&[1, 2, 4], &[3.0, 3.0, 3.0]).unwrap().abs() < 1e-12);
    assert!(matches!(rate_slope(&[1, 2, 4], &[1.0, 0.0, 0.5]), Err(Error::ZeroError { budget: 2 })));
    assert!(rate_slope(&[1, 2], &[1.0, 0.5]).is_err());
}

#[test]
fn largest_indices_break_ties_low() {
    assert_eq!(largest_indices(&[1.0, -3.0, 3.0, 0.5], 2), vec![1, 2]);
    assert_eq!(largest_indices(&[2.0, 2.0, 2.0], 1), vec![0]);
    assert!(largest_indices(&[1.0], 0).is_empty());
}

#[test]
fn legendre_budget_edges() {
    let grid = Grid::new(1024).unwrap();
    let star = TestSignal::star(grid);
    let coeffs = legendre_project(&star, 64, 64).unwrap();
    let zero = legendre_best_n(&star, 0, &coeffs).unwrap();
    let norm = error_l2(&star.samples, &vec![0.0; 1024], grid).unwrap();
    assert!((zero.error - norm).abs() < 1e-15);
    // Every nonzero coefficient kept: the error is the floor of the ceiling.
    let nonzero = coeffs.iter().filter(|c| c.abs() > 1e-14).count();
    let full = legendre_best_n(&star, nonzero, &coeffs).unwrap();
    let all = legendre_best_n(&star, 64, &coeffs).unwrap();
    assert!((full.error - all.error).abs() < 1e-12);
}

#[test]
fn legendre_error_is_monotone() {
    let grid = Grid::new(2048).unwrap();
    let star = TestSignal::star(grid);
    let coeffs = legendre_project(&star, 256, 160).unwrap();
    let mut last = f64::INFINITY;
    for n in [0, 4, 16, 64, 128] {
        let e = legendre_best_n(&star, n, &coeffs).unwrap().error;
        assert!(e <= last + 1e-12);
        last = e;
    }
}

#[test]
fn legendre_tail_identity_in_continuous_norm() {
    // Residual of a best-N approximation from a finite expansion, measured
    // exactly by Gauss quadrature: ‖f_K - Σ_Γ a_n ℓ_n‖² = Σ_{n ∉ Γ} a_n².
    let grid = Grid::new(64).unwrap();
    let star = TestSignal::star(grid);
    let k = 40;
    let coeffs = legendre_project(&star, k, 64).unwrap();
    let keep = largest_indices(&coeffs, 12);
    let (x, w) = gauss_legendre(64);
    let mut residual_sq = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let t = 0.5 * (xi + 1.0);
        let l = crate::frames::legendre::shifted_legendre(t, k);
        let r: f64 = (0..k).filter(|n| !keep.contains(n)).map(|n| coeffs[n] * l[n]).sum();
        residual_sq += 0.5 * wi * r * r;
    }
    let tail: f64 = (0..k).filter(|n| !keep.contains(n)).map(|n| coeffs[n] * coeffs[n]).sum();
    assert!((residual_sq - tail).abs() <= 1e-9);
}

#[test]
fn dwt_threshold_properties() {
    let grid = Grid::new(512).unwrap();
    let f = TestSignal::two_step(grid);
    let levels = 5;
    let all = dwt_threshold_n(&f.samples, 512, levels, grid).unwrap();
    assert!(all.error <= 1e-10);
    let coeffs = dwt_db6(&f.samples, levels, Direction::Forward).unwrap();
    let mut last = f64::INFINITY;
    for n in 0..80 {
        let r = dwt_threshold_n(&f.samples, n, levels, grid).unwrap();
        assert!(r.error <= last + 1e-12);
        last = r.error;
        let tail: f64 = (0..512).filter(|i| !r.selected.contains(i)).map(|i| coeffs[i] * coeffs[i]).sum();
        assert!((r.error * r.error - grid.dt() * tail).abs() <= 1e-9);
    }
}

#[test]
fn default_levels_keep_a_full_filter() {
    assert_eq!(default_levels(2048), 7);
    assert_eq!(default_levels(24), 1);
    assert_eq!(default_levels(100), 2);
}
