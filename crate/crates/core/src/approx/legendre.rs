//! Legendre coefficients of step signals.

use alloc::vec;
use alloc::vec::Vec;

use super::signals::TestSignal;
use crate::frames::legendre::{legendre_p, shifted_legendre};
use crate::{Error, Result};

/// Largest supported truncation ceiling.
pub const MAX_CEILING: usize = 2048;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n and P_{n-1} by recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pm) = if order == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        nodes[order - 1 - i] = x;
        nodes[i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// `a_n = ⟨f, ℓ_n⟩_{L²(0,1)}` for `n < ceiling`, by Gauss–Legendre quadrature
/// of order `quad_order` on every constant piece (exact for `2·quad_order > n`).
pub fn legendre_project(signal: &TestSignal, ceiling: usize, quad_order: usize) -> Result<Vec<f64>> {
    if ceiling > MAX_CEILING {
        return Err(Error::InvalidParameter(alloc::format!("ceiling {ceiling} exceeds {MAX_CEILING}")));
    }
    if 2 * quad_order < ceiling {
        return Err(Error::InvalidParameter(alloc::format!(
            "quadrature order {quad_order} too low for {ceiling} coefficients"
        )));
    }
    let (nodes, weights) = gauss_legendre(quad_order);
    let mut coeffs = vec![0.0; ceiling];
    for (a, b, amplitude) in signal.pieces() {
        if amplitude == 0.0 {
            continue;
        }
        let half = 0.5 * (b - a);
        for (x, w) in nodes.iter().zip(&weights) {
            let t = a + half * (x + 1.0);
            let scale = amplitude * w * half;
            for (c, l) in coeffs.iter_mut().zip(shifted_legendre(t, ceiling)) {
                *c += scale * l;
            }
        }
    }
    Ok(coeffs)
}

/// `P_{2m}(0) = (-1)^m binom(2m, m) / 4^m`; zero for odd degree.
pub fn legendre_at_zero(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    // binom(2m, m)/4^m = Π_{j=1..m} (2j-1)/(2j), computed without overflow.
    let m = n / 2;
    let magnitude: f64 = (1..=m).map(|j| (2 * j - 1) as f64 / (2 * j) as f64).product();
    if m % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Closed-form Legendre coefficient of `1_{[0, 1/2]}`:
/// `a_n = (P_{n+1}(0) - P_{n-1}(0)) / (2 √(2n+1))`.
pub fn step_coeff_closed_form(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("closed form needs n >= 1".into()));
    }
    Ok((legendre_at_zero(n + 1) - legendre_at_zero(n - 1)) / (2.0 * libm::sqrt((2 * n + 1) as f64)))
}

/// `ℓ_n` sampled on a grid for each requested degree.
pub fn legendre_rows(degrees: &[usize], grid: crate::Grid) -> Vec<Vec<f64>> {
    let top = degrees.iter().max().map_or(0, |d| d + 1);
    let mut rows = vec![vec![0.0; grid.len()]; degrees.len()];
    for i in 0..grid.len() {
        let x = 2.0 * grid.point(i) - 1.0;
        let p = legendre_p(x, top);
        for (row, &d) in rows.iter_mut().zip(degrees) {
            row[i] = libm::sqrt((2 * d + 1) as f64) * p[d];
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        for order in [1, 2, 5, 16, 257] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * order - 1;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, deg as f64 - 1.0)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((integral - exact).abs() < 1e-13, "order {order}");
        }
    }

    #[test]
    fn constant_signal() {
        let grid = Grid::new(16).unwrap();
        let one = TestSignal::piecewise(super::super::SignalKind::Custom, &[0.5], &[1.0, 1.0], grid).unwrap();
        let a = legendre_project(&one, 12, 8).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!(a[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn star_coefficients() {
        let star = TestSignal::star(Grid::new(16).unwrap());
        let a = legendre_project(&star, 130, 96).unwrap();
        assert!((a[1] + 3f64.sqrt() / 4.0).abs() < 1e-12);
        for m in 1..=32 {
            assert!(a[2 * m].abs() < 1e-12);
        }
        for n in 1..=64 {
            assert!((a[n] - step_coeff_closed_form(n).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(step_coeff_closed_form(2).unwrap(), 0.0);
        assert!((step_coeff_closed_form(1).unwrap() + 3f64.sqrt() / 4.0).abs() < 1e-15);
        for m in 0..=64 {
            assert!(step_coeff_closed_form(2 * m + 1).unwrap().abs() >= 0.05 / (m + 1) as f64);
        }
    }
}
