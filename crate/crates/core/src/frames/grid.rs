use alloc::vec::Vec;

use crate::{Error, Result};

/// Uniform grid `t_i = i / (L - 1)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    len: usize,
}

impl Grid {
    pub fn new(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidParameter(alloc::format!("grid length {len} < 2")));
        }
        Ok(Self { len })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        1.0 / (self.len - 1) as f64
    }

    /// `i / (L - 1)`; endpoints are exactly 0 and 1.
    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            1.0
        } else {
            i as f64 / (self.len - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    /// Quadrature weights for `∫_0^1` on this grid: the trapezoid rule with
    /// Gregory end corrections of order 8, exact for polynomials up to degree
    /// 7 and `O(dt^8)` accurate for smooth integrands. Falls back to the plain
    /// trapezoid rule on grids shorter than 16 points.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let l = self.len;
        let dt = self.dt();
        let mut w = alloc::vec![dt; l];
        if l < 2 * GREGORY_ORDER {
            w[0] = 0.5 * dt;
            w[l - 1] = 0.5 * dt;
            return w;
        }
        let corr = gregory_corrections();
        for (j, c) in corr.iter().enumerate() {
            w[j] = dt * (1.0 + c);
            w[l - 1 - j] = dt * (1.0 + c);
        }
        w
    }
}

const GREGORY_ORDER: usize = 8;

/// Endpoint corrections `δ_j` (added to unit interior weights) solving
/// `Σ_j δ_j j^k = -E_k` for `k < 8`, where `E_k` is the Euler–Maclaurin end
/// functional applied to `x^k`: `E_0 = 1/2`, `E_k = -B_{k+1}/(k+1)` for odd
/// `k`, zero otherwise.
fn gregory_corrections() -> [f64; GREGORY_ORDER] {
    // Bernoulli numbers B_2, B_4, B_6, B_8.
    const BERNOULLI: [f64; 4] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let m = GREGORY_ORDER;
    let mut a = [[0.0f64; GREGORY_ORDER]; GREGORY_ORDER];
    let mut rhs = [0.0f64; GREGORY_ORDER];
    for k in 0..m {
        for j in 0..m {
            a[k][j] = libm::pow(j as f64, k as f64);
        }
        a[k][0] = if k == 0 { 1.0 } else { 0.0 };
        let e_k = if k == 0 {
            0.5
        } else if k % 2 == 1 {
            -BERNOULLI[(k - 1) / 2] / (k + 1) as f64
        } else {
            0.0
        };
        rhs[k] = -e_k;
    }
    // Small dense solve with partial pivoting.
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for c in col..m {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [0.0; GREGORY_ORDER];
    for r in (0..m).rev() {
        let mut acc = rhs[r];
        for c in r + 1..m {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = Grid::new(7).unwrap();
        assert_eq!(g.point(0), 0.0);
        assert_eq!(g.point(6), 1.0);
        let p = g.points();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn corrected_weights_integrate_polynomials() {
        let g = Grid::new(101).unwrap();
        let w = g.quadrature_weights();
        for k in 0..=7 {
            let approx: f64 =
                w.iter().enumerate().map(|(i, wi)| wi * libm::pow(g.point(i), k as f64)).sum();
            assert!((approx - 1.0 / (k + 1) as f64).abs() < 1e-13, "degree {k}");
        }
        // Smooth non-polynomial integrand: ∫ exp = e - 1.
        let approx: f64 = w.iter().enumerate().map(|(i, wi)| wi * libm::exp(g.point(i))).sum();
        assert!((approx - (core::f64::consts::E - 1.0)).abs() < 1e-14);
    }
}
