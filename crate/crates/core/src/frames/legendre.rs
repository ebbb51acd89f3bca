//! Orthonormal shifted Legendre polynomials `ℓ_n(t) = √(2n+1) P_n(2t − 1)`.

use alloc::vec;
use alloc::vec::Vec;

/// `P_0(x), …, P_{n-1}(x)` by the three-term recurrence.
pub fn legendre_p(x: f64, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    if n == 0 {
        return p;
    }
    p[0] = 1.0;
    if n > 1 {
        p[1] = x;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

/// `P_n(x)` and `P_n'(x)` for `n < count`, using
/// `P'_{n+1} = P'_{n-1} + (2n + 1) P_n`.
pub fn legendre_p_and_derivative(x: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let p = legendre_p(x, count);
    let mut dp = vec![0.0; count];
    if count > 1 {
        dp[1] = 1.0;
    }
    for k in 1..count.saturating_sub(1) {
        dp[k + 1] = dp[k - 1] + (2.0 * k as f64 + 1.0) * p[k];
    }
    (p, dp)
}

/// `ℓ_n(t)` for `n < count`.
pub fn shifted_legendre(t: f64, count: usize) -> Vec<f64> {
    let mut p = legendre_p(2.0 * t - 1.0, count);
    for (n, v) in p.iter_mut().enumerate() {
        *v *= libm::sqrt(2.0 * n as f64 + 1.0);
    }
    p
}

/// `ℓ_n(t)` and `ℓ_n'(t)` for `n < count`.
pub fn shifted_legendre_and_derivative(t: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let (mut p, mut dp) = legendre_p_and_derivative(2.0 * t - 1.0, count);
    for n in 0..count {
        let c = libm::sqrt(2.0 * n as f64 + 1.0);
        p[n] *= c;
        dp[n] *= 2.0 * c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_closed_form() {
        let x = 0.3;
        let p = legendre_p(x, 4);
        assert!((p[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        let (_, dp) = legendre_p_and_derivative(x, 4);
        assert!((dp[2] - 3.0 * x).abs() < 1e-15);
        assert!((dp[3] - 0.5 * (15.0 * x * x - 3.0)).abs() < 1e-15);
    }

    #[test]
    fn endpoint_values() {
        let l1 = shifted_legendre(1.0, 6);
        let l0 = shifted_legendre(0.0, 6);
        for n in 0..6 {
            let c = libm::sqrt(2.0 * n as f64 + 1.0);
            assert!((l1[n] - c).abs() < 1e-13);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((l0[n] - sign * c).abs() < 1e-13);
        }
    }
}
