//! Redundant continuous-wavelet dictionaries and orthogonal matching pursuit.

use alloc::vec;
use alloc::vec::Vec;

use crate::frames::wavelets::Mother;
use crate::frames::{Family, Grid};
use crate::numerics::{lu_solve, Matrix};
use crate::{Error, Result};

/// Default ridge weight of the refit.
pub const DEFAULT_RIDGE: f64 = 1e-7;
/// Residual norm at which pursuit stops early.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// One dictionary atom, stored on the contiguous range of grid points where
/// it is not flushed to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryAtom {
    pub scale: f64,
    pub shift: f64,
    pub start: usize,
    pub values: Vec<f64>,
}

impl DictionaryAtom {
    /// `dt`-weighted inner product with a full-grid vector.
    fn dot(&self, x: &[f64], dt: f64) -> f64 {
        dt * self.values.iter().zip(&x[self.start..]).map(|(a, b)| a * b).sum::<f64>()
    }

    fn axpy(&self, c: f64, x: &mut [f64]) {
        for (xi, v) in x[self.start..].iter_mut().zip(&self.values) {
            *xi += c * v;
        }
    }

    /// Samples on the full grid.
    pub fn dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        out[self.start..self.start + self.values.len()].copy_from_slice(&self.values);
        out
    }
}

/// Atoms `a^{-1/2} ψ((t - b)/a)` on a geometric scale grid and uniform shifts,
/// each with unit discrete `L²` norm `(dt Σ φ²)^{1/2} = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    pub grid: Grid,
    pub atoms: Vec<DictionaryAtom>,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Dense `D × L` matrix of the atoms.
    pub fn to_matrix(&self) -> Matrix {
        let l = self.grid.len();
        let mut m = Matrix::zeros(self.atoms.len(), l);
        for (r, atom) in self.atoms.iter().enumerate() {
            m.row_mut(r).copy_from_slice(&atom.dense(l));
        }
        m
    }
}

/// Dictionary settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwtParams {
    pub n_scales: usize,
    pub n_shifts: usize,
    pub a_min: f64,
    pub a_max: f64,
}

impl CwtParams {
    /// 32 scales from `3 dt` to `0.15`, 512 shifts.
    pub fn defaults(grid: Grid) -> Self {
        Self { n_scales: 32, n_shifts: 512, a_min: 3.0 * grid.dt(), a_max: 0.15 }
    }
}

pub fn build_cwt_dictionary(mother: &Family, params: CwtParams, grid: Grid) -> Result<Dictionary> {
    let psi: Mother = mother
        .mother()
        .ok_or_else(|| Error::InvalidParameter(alloc::format!("{mother} has no analytic mother wavelet")))?;
    let CwtParams { n_scales, n_shifts, a_min, a_max } = params;
    if !(a_min > 0.0 && a_min < a_max) || n_scales == 0 || n_shifts == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "need 0 < a_min < a_max and positive counts, got {a_min}, {a_max}, {n_scales}, {n_shifts}"
        )));
    }
    let dt = grid.dt();
    let l = grid.len();
    let mut atoms = Vec::with_capacity(n_scales * n_shifts);
    for k in 0..n_scales {
        let a = if n_scales == 1 {
            a_min
        } else {
            a_min * libm::pow(a_max / a_min, k as f64 / (n_scales - 1) as f64)
        };
        for m in 0..n_shifts {
            let b = if n_shifts == 1 { 0.5 } else { m as f64 / (n_shifts - 1) as f64 };
            let full: Vec<f64> = (0..l)
                .map(|i| {
                    let v = psi.eval((grid.point(i) - b) / a) / libm::sqrt(a);
                    if v.abs() < 1e-300 {
                        0.0
                    } else {
                        v
                    }
                })
                .collect();
            let first = full.iter().position(|v| *v != 0.0);
            let last = full.iter().rposition(|v| *v != 0.0);
            let (start, end) = match (first, last) {
                (Some(f), Some(e)) => (f, e + 1),
                _ => return Err(Error::DegenerateAtom { energy: 0.0 }),
            };
            let mut values = full[start..end].to_vec();
            let energy = dt * values.iter().map(|v| v * v).sum::<f64>();
            if !(energy >= 1e-14) {
                return Err(Error::DegenerateAtom { energy });
            }
            let inv = 1.0 / libm::sqrt(energy);
            values.iter_mut().for_each(|v| *v *= inv);
            atoms.push(DictionaryAtom { scale: a, shift: b, start, values });
        }
    }
    Ok(Dictionary { grid, atoms })
}

/// Result of a pursuit.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpResult {
    pub selected: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub approximation: Vec<f64>,
    /// Discrete `L²` residual norm after each selection.
    pub residual_norms: Vec<f64>,
}

/// Greedy selection by largest `|⟨r, φ⟩|` (lowest index on ties), with a
/// ridge-regularized least-squares refit of all selected coefficients after
/// every step.
pub fn omp_ridge(dictionary: &Dictionary, f: &[f64], budget: usize, ridge: f64) -> Result<OmpResult> {
    if !(1e-9..=1e-4).contains(&ridge) {
        return Err(Error::InvalidParameter(alloc::format!("ridge {ridge} outside [1e-9, 1e-4]")));
    }
    let l = dictionary.grid.len();
    if f.len() != l {
        return Err(Error::DimensionMismatch { expected: (l, 1), found: (f.len(), 1) });
    }
    if budget > dictionary.len() {
        return Err(Error::InvalidParameter(alloc::format!("budget {budget} exceeds {} atoms", dictionary.len())));
    }
    let dt = dictionary.grid.dt();
    let norm = |x: &[f64]| libm::sqrt(dt * x.iter().map(|v| v * v).sum::<f64>());
    let mut residual = f.to_vec();
    let mut selected: Vec<usize> = Vec::with_capacity(budget);
    let mut chosen = vec![false; dictionary.len()];
    let mut gram: Vec<Vec<f64>> = Vec::with_capacity(budget);
    let mut rhs: Vec<f64> = Vec::with_capacity(budget);
    let mut coefficients = Vec::new();
    let mut approximation = vec![0.0; l];
    let mut residual_norms = Vec::with_capacity(budget);
    while selected.len() < budget && norm(&residual) > RESIDUAL_FLOOR {
        let mut best = None;
        let mut best_value = -1.0;
        for (idx, atom) in dictionary.atoms.iter().enumerate() {
            if chosen[idx] {
                continue;
            }
            let c = atom.dot(&residual, dt).abs();
            if c > best_value {
                best_value = c;
                best = Some(idx);
            }
        }
        let Some(idx) = best else { break };
        chosen[idx] = true;
        let atom = &dictionary.atoms[idx];
        let dense = atom.dense(l);
        let row: Vec<f64> = selected.iter().map(|&j| dictionary.atoms[j].dot(&dense, dt)).collect();
        for (g, v) in gram.iter_mut().zip(&row) {
            g.push(*v);
        }
        let mut new_row = row;
        new_row.push(atom.dot(&dense, dt));
        gram.push(new_row);
        rhs.push(atom.dot(f, dt));
        selected.push(idx);

        let k = selected.len();
        let system = Matrix::from_fn(k, k, |i, j| gram[i][j] + if i == j { ridge } else { 0.0 });
        let b = Matrix::from_vec(k, 1, rhs.clone())?;
        coefficients = lu_solve(&system, &b)?.into_vec();
        approximation = vec![0.0; l];
        for (&j, &c) in selected.iter().zip(&coefficients) {
            dictionary.atoms[j].axpy(c, &mut approximation);
        }
        residual = f.iter().zip(&approximation).map(|(a, b)| a - b).collect();
        residual_norms.push(norm(&residual));
    }
    Ok(OmpResult { selected, coefficients, approximation, residual_norms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_dictionary() -> Dictionary {
        let grid = Grid::new(256).unwrap();
        let params = CwtParams { n_scales: 6, n_shifts: 32, a_min: 3.0 * grid.dt(), a_max: 0.15 };
        build_cwt_dictionary(&Family::MexHat, params, grid).unwrap()
    }

    #[test]
    fn dictionary_shape_and_norms() {
        let d = small_dictionary();
        assert_eq!(d.len(), 6 * 32);
        let dt = d.grid.dt();
        for atom in &d.atoms {
            let e: f64 = dt * atom.values.iter().map(|v| v * v).sum::<f64>();
            assert!((e - 1.0).abs() < 1e-10);
        }
        let grid = Grid::new(64).unwrap();
        let one = build_cwt_dictionary(&Family::MexHat, CwtParams { n_scales: 1, n_shifts: 1, a_min: 0.05, a_max: 0.1 }, grid)
            .unwrap();
        assert_eq!(one.len(), 1);
        assert!(build_cwt_dictionary(&Family::Db6, CwtParams::defaults(grid), grid).is_err());
    }

    #[test]
    fn recovers_a_single_atom() {
        let d = small_dictionary();
        let f = d.atoms[77].dense(256);
        let r = omp_ridge(&d, &f, 5, 1e-9).unwrap();
        assert_eq!(r.selected[0], 77);
        assert!(*r.residual_norms.last().unwrap() <= 1e-6);
    }

    #[test]
    fn residual_never_increases() {
        let d = small_dictionary();
        let grid = d.grid;
        let f: Vec<f64> = (0..256).map(|i| if grid.point(i) >= 0.4 { 1.0 } else { -0.2 }).collect();
        let r = omp_ridge(&d, &f, 40, DEFAULT_RIDGE).unwrap();
        assert!(r.residual_norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn zero_signal_stops_immediately() {
        let d = small_dictionary();
        let r = omp_ridge(&d, &[0.0; 256], 10, DEFAULT_RIDGE).unwrap();
        assert!(r.selected.is_empty());
    }

    #[test]
    fn rejects_bad_ridge() {
        let d = small_dictionary();
        assert!(omp_ridge(&d, &[0.0; 256], 1, 1.0).is_err());
    }
}
