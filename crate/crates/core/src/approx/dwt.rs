//! Periodized orthonormal db6 discrete wavelet transform.
//!
//! Coefficients are laid out as `[a_J | d_J | d_{J-1} | … | d_1]`, coarsest
//! first, with `L / 2^j` detail coefficients at level `j`.

use alloc::vec;
use alloc::vec::Vec;

use crate::frames::db6::{highpass, validated_filter, DB6_LEN};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn check_length(len: usize, levels: usize) -> Result<()> {
    let block = 1usize.checked_shl(levels as u32).unwrap_or(0);
    if levels == 0 || block == 0 || len == 0 || len % block != 0 {
        return Err(Error::BadLength { len, levels });
    }
    Ok(())
}

/// Forward (`signal → coefficients`) or inverse transform over `levels`.
pub fn dwt_db6(x: &[f64], levels: usize, direction: Direction) -> Result<Vec<f64>> {
    check_length(x.len(), levels)?;
    let h = validated_filter()?;
    let g = highpass();
    let mut out = x.to_vec();
    match direction {
        Direction::Forward => {
            let mut n = x.len();
            for _ in 0..levels {
                let (a, d) = analyze(&out[..n], &h, &g);
                out[..n / 2].copy_from_slice(&a);
                out[n / 2..n].copy_from_slice(&d);
                n /= 2;
            }
        }
        Direction::Inverse => {
            let mut n = x.len() >> levels;
            for _ in 0..levels {
                let a = synthesize(&out[..n], &out[n..2 * n], &h, &g);
                out[..2 * n].copy_from_slice(&a);
                n *= 2;
            }
        }
    }
    Ok(out)
}

fn analyze(x: &[f64], h: &[f64; DB6_LEN], g: &[f64; DB6_LEN]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for k in 0..half {
        for j in 0..DB6_LEN {
            let v = x[(2 * k + j) % n];
            a[k] += h[j] * v;
            d[k] += g[j] * v;
        }
    }
    (a, d)
}

fn synthesize(a: &[f64], d: &[f64], h: &[f64; DB6_LEN], g: &[f64; DB6_LEN]) -> Vec<f64> {
    let n = 2 * a.len();
    let mut x = vec![0.0; n];
    for k in 0..a.len() {
        for j in 0..DB6_LEN {
            x[(2 * k + j) % n] += h[j] * a[k] + g[j] * d[k];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..2048).map(|_| (rng.next_u32() as f64 / u32::MAX as f64) - 0.5).collect();
        let c = dwt_db6(&x, 6, Direction::Forward).unwrap();
        let back = dwt_db6(&c, 6, Direction::Inverse).unwrap();
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() <= 1e-10));
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let ec: f64 = c.iter().map(|v| v * v).sum();
        assert!((ex - ec).abs() <= 1e-10 * ex.max(1.0));
    }

    #[test]
    fn constant_has_no_detail() {
        let c = dwt_db6(&[2.5; 256], 4, Direction::Forward).unwrap();
        assert!(c[16..].iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn rejects_bad_length() {
        assert!(matches!(dwt_db6(&[0.0; 100], 3, Direction::Forward), Err(Error::BadLength { .. })));
        assert!(dwt_db6(&[0.0; 64], 0, Direction::Forward).is_err());
    }
}
