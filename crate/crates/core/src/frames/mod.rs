//! Discretized frames: construction, normalization, tightening, diagnostics.
//!
//! Wavelet families follow one recipe. Log-spaced pseudo-frequencies become
//! scales through the prototype's central frequency, each scale gets a number
//! of shifts proportional to `L / hop` (largest-remainder apportionment to
//! exactly `N` atoms), and every atom is normalized to unit energy. Legendre
//! frames come straight from the three-term recurrence.

pub mod db6;
pub mod dpss;
mod grid;
pub mod legendre;
pub mod wavelets;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use grid::Grid;
use wavelets::{Mother, SampledPrototype, MORLET_OMEGA0};

use crate::numerics::{norm2, psd_inverse_sqrt, spectrum, Matrix, SpectrumReport};
use crate::{Error, Result};

/// Hop factor `α` of the shift allocation.
pub const DEFAULT_HOP_FACTOR: f64 = 0.75;
/// Time-half-bandwidth product of the Slepian tapers; plays the role of the
/// central frequency when mapping pseudo-frequencies to window lengths.
pub const DPSS_TIME_BANDWIDTH: f64 = 3.0;
/// Cascade depth used to tabulate the db6 wavelet.
pub const DB6_CASCADE_LEVELS: usize = 8;
/// Samples smaller than this are flushed to zero.
const FLUSH_TO_ZERO: f64 = 1e-300;
/// Minimum raw energy of an atom on the grid.
const MIN_ATOM_ENERGY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Morlet,
    GaussDeriv { order: u32 },
    MexHat,
    Dpss,
    Db6,
    Legendre,
}

impl Family {
    /// The five wavelet families, in a fixed order.
    pub const WAVELETS: [Family; 5] =
        [Family::Morlet, Family::GaussDeriv { order: 1 }, Family::MexHat, Family::Dpss, Family::Db6];

    /// Analytic mother wavelet, for the continuous families.
    pub fn mother(&self) -> Option<Mother> {
        match *self {
            Family::Morlet => Some(Mother::Morlet { omega0: MORLET_OMEGA0 }),
            Family::GaussDeriv { order } => Some(Mother::GaussDeriv { order }),
            Family::MexHat => Some(Mother::GaussDeriv { order: 2 }),
            _ => None,
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        !matches!(self, Family::Dpss | Family::Db6)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Morlet => f.write_str("morlet"),
            Family::GaussDeriv { order: 1 } => f.write_str("gauss"),
            Family::GaussDeriv { order } => write!(f, "gauss{order}"),
            Family::MexHat => f.write_str("mexhat"),
            Family::Dpss => f.write_str("dpss"),
            Family::Db6 => f.write_str("db6"),
            Family::Legendre => f.write_str("legendre"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `morlet`/`morl`, `gauss`/`gaus` (order 1) or `gaussP`,
    /// `mexhat`/`mexh`, `dpss`, `db6`, `legendre`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let family = match lower.as_str() {
            "morlet" | "morl" => Family::Morlet,
            "gauss" | "gaus" => Family::GaussDeriv { order: 1 },
            "mexhat" | "mexh" => Family::MexHat,
            "dpss" => Family::Dpss,
            "db6" => Family::Db6,
            "legendre" | "legs" => Family::Legendre,
            other => {
                let digits = other.strip_prefix("gauss").or_else(|| other.strip_prefix("gaus"));
                match digits.and_then(|d| d.parse::<u32>().ok()) {
                    Some(order) if order >= 1 => Family::GaussDeriv { order },
                    _ => return Err(Error::InvalidParameter(alloc::format!("unknown family `{s}`"))),
                }
            }
        };
        Ok(family)
    }
}

/// Row normalization applied after sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Normalization {
    /// Every row has unit Euclidean norm on the grid.
    #[default]
    UnitEnergy,
    /// Rows keep their native scale; for Legendre these are samples of the
    /// `L²(0,1)`-orthonormal polynomials.
    Native,
}

/// Full description of a frame; building is deterministic given the spec.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FrameSpec {
    pub family: Family,
    pub n_atoms: usize,
    pub grid_len: usize,
    /// Pseudo-frequency bounds, cycles per unit interval.
    pub f_min: f64,
    pub f_max: f64,
    pub n_scales: usize,
    pub hop_factor: f64,
    /// Per-scale Morlet modulation (rad per unit time); empty means
    /// `π f_k L / (L - 1)`.
    pub morlet_omegas: Vec<f64>,
    /// Per-scale Slepian half-bandwidths (cycles per sample); empty means
    /// `NW / M_k`.
    pub dpss_bandwidths: Vec<f64>,
    /// Taper orders used per Slepian window length.
    pub dpss_tapers: usize,
    pub normalization: Normalization,
    pub rng_seed: u64,
}

impl FrameSpec {
    /// Spec with the default frequency range and recipe constants.
    pub fn new(family: Family, n_atoms: usize, grid_len: usize) -> Self {
        let f_max = ((grid_len.saturating_sub(1)) as f64 / 8.0).clamp(4.0, 64.0);
        Self {
            family,
            n_atoms,
            grid_len,
            f_min: 2.0,
            f_max,
            n_scales: 6,
            hop_factor: DEFAULT_HOP_FACTOR,
            morlet_omegas: Vec::new(),
            dpss_bandwidths: Vec::new(),
            dpss_tapers: 2,
            normalization: Normalization::UnitEnergy,
            rng_seed: 0,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_atoms == 0 {
            return bad("atom count must be positive".into());
        }
        if self.grid_len < 3 {
            return bad(alloc::format!("grid length {} < 3", self.grid_len));
        }
        if self.family != Family::Legendre {
            if !(self.f_min > 0.0 && self.f_min < self.f_max) {
                return bad(alloc::format!("need 0 < f_min < f_max, got {} and {}", self.f_min, self.f_max));
            }
            if self.n_scales == 0 {
                return bad("n_scales must be positive".into());
            }
            if !(self.hop_factor > 0.0) {
                return bad(alloc::format!("hop factor {} must be positive", self.hop_factor));
            }
        }
        if let Family::GaussDeriv { order } = self.family {
            if order == 0 {
                return bad("Gaussian derivative order must be at least 1".into());
            }
        }
        if !self.morlet_omegas.is_empty() && self.morlet_omegas.len() != self.n_scales {
            return bad("morlet_omegas must list one modulation per scale".into());
        }
        if !self.dpss_bandwidths.is_empty() && self.dpss_bandwidths.len() != self.n_scales {
            return bad("dpss_bandwidths must list one bandwidth per scale".into());
        }
        if self.family == Family::Dpss && self.dpss_tapers == 0 {
            return bad("dpss_tapers must be positive".into());
        }
        Ok(())
    }
}

/// Where an atom came from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AtomInfo {
    /// Dilation `s_k` (time units); polynomial degree for Legendre rows.
    pub scale: f64,
    /// Center `τ_m` on `[0, 1]`.
    pub center: f64,
    /// Modulation `ω_ℓ` (Morlet only).
    pub modulation: Option<f64>,
    /// Slepian taper order (DPSS only).
    pub taper_order: Option<usize>,
}

/// `N × L` matrix of sampled atoms plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    matrix: Matrix,
    grid: Grid,
    spec: FrameSpec,
    atoms: Vec<AtomInfo>,
    unit_norm: bool,
    tightened: bool,
    derivative: Option<Matrix>,
}

impl FrameMatrix {
    /// Reassembles a frame (for instance after loading it from disk).
    pub fn from_parts(
        matrix: Matrix,
        spec: FrameSpec,
        atoms: Vec<AtomInfo>,
        unit_norm: bool,
        tightened: bool,
        derivative: Option<Matrix>,
    ) -> Result<Self> {
        let grid = Grid::new(matrix.cols())?;
        if atoms.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: (matrix.rows(), 1),
                found: (atoms.len(), 1),
            });
        }
        if let Some(d) = &derivative {
            if d.shape() != matrix.shape() {
                return Err(Error::DimensionMismatch { expected: matrix.shape(), found: d.shape() });
            }
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter("frame has non-finite entries".into()));
        }
        Ok(Self { matrix, grid, spec, atoms, unit_norm, tightened, derivative })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    pub fn atoms(&self) -> &[AtomInfo] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_unit_norm(&self) -> bool {
        self.unit_norm
    }

    pub fn is_tightened(&self) -> bool {
        self.tightened
    }

    /// Closed-form row derivatives `d/dt`, when the family has them.
    pub fn analytic_derivative(&self) -> Option<&Matrix> {
        self.derivative.as_ref()
    }

    /// `S = F Fᵀ`.
    pub fn frame_operator(&self) -> Matrix {
        self.matrix.gram_rows()
    }

    /// FNV-1a fingerprint of the matrix entries.
    pub fn fingerprint(&self) -> u64 {
        let mut hash = crate::FNV_OFFSET;
        for v in self.matrix.as_slice() {
            hash = crate::fnv1a64_update(hash, &v.to_le_bytes());
        }
        hash
    }
}

/// Log-spaced frequencies on `[f_min, f_max]` (endpoints included) and
/// their scales `s_k = f_c / f_k`, strictly decreasing. With a single scale
/// only `f_min` is used.
pub fn scales_from_frequencies(f_min: f64, f_max: f64, n_scales: usize, f_c: f64) -> (Vec<f64>, Vec<f64>) {
    let freqs: Vec<f64> = match n_scales {
        0 => Vec::new(),
        1 => vec![f_min],
        n => {
            let ratio = libm::log(f_max / f_min);
            (0..n)
                .map(|k| {
                    if k + 1 == n {
                        f_max
                    } else {
                        f_min * libm::exp(ratio * k as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
    };
    let scales = freqs.iter().map(|f| f_c / f).collect();
    (freqs, scales)
}

/// Integer counts summing to `total`, proportional to `desired`: floors of
/// the normalized shares, then one extra to each of the largest remainders
/// (ties go to the lower index).
pub fn largest_remainder(desired: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = desired.iter().sum();
    if desired.is_empty() || !(sum > 0.0) {
        return vec![0; desired.len()];
    }
    let shares: Vec<f64> = desired.iter().map(|d| d / sum * total as f64).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| libm::floor(*s) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..desired.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - libm::floor(shares[a]);
        let rb = shares[b] - libm::floor(shares[b]);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &idx in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[idx] += 1;
    }
    counts
}

/// Centers (in samples, on `[0, L-1]`) per scale. Scale `k` with width
/// `σ_k` samples asks for `L / (α σ_k)` centers; these desired counts are
/// apportioned to exactly `n_atoms` and placed uniformly. When there are at
/// least as many atoms as scales, every scale keeps at least one center.
pub fn allocate_shifts(widths: &[f64], hop_factor: f64, grid_len: usize, n_atoms: usize) -> Vec<Vec<f64>> {
    let desired: Vec<f64> =
        widths.iter().map(|w| grid_len as f64 / (hop_factor * w).max(1e-12)).collect();
    let mut counts = largest_remainder(&desired, n_atoms);
    if n_atoms >= counts.len() {
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let donor = (0..counts.len()).max_by_key(|&i| (counts[i], usize::MAX - i)).unwrap_or(0);
            counts[donor] -= 1;
            counts[empty] += 1;
        }
    }
    counts
        .into_iter()
        .map(|count| uniform_centers(count, grid_len))
        .collect()
}

fn uniform_centers(count: usize, grid_len: usize) -> Vec<f64> {
    let last = (grid_len - 1) as f64;
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * last],
        n => (0..n).map(|j| last * j as f64 / (n - 1) as f64).collect(),
    }
}

/// A sampled, unit-energy atom and (when available) its time derivative
/// scaled by the same factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAtom {
    pub values: Vec<f64>,
    pub derivative: Option<Vec<f64>>,
}

/// Evaluates atoms of one family at arbitrary scale and center.
#[derive(Debug, Clone)]
enum Sampler {
    Analytic(Mother),
    Tabulated { prototype: SampledPrototype, center: f64 },
}

impl Sampler {
    fn for_family(family: &Family) -> Result<Self> {
        if let Some(mother) = family.mother() {
            return Ok(Sampler::Analytic(mother));
        }
        match family {
            Family::Db6 => {
                let prototype = db6::db6_samples(DB6_CASCADE_LEVELS)?.wavelet_prototype();
                let center = prototype.energy_center();
                Ok(Sampler::Tabulated { prototype, center })
            }
            _ => Err(Error::InvalidParameter(alloc::format!("{family} atoms are not dilations"))),
        }
    }

    fn prototype(&self) -> SampledPrototype {
        match self {
            Sampler::Analytic(m) => m.prototype(),
            Sampler::Tabulated { prototype, .. } => prototype.clone(),
        }
    }

    fn sample(&self, scale: f64, center: f64, omega: Option<f64>, grid: Grid) -> Result<SampledAtom> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("scale {scale} must be positive")));
        }
        let l = grid.len();
        let mut values = vec![0.0; l];
        let mut derivative = matches!(self, Sampler::Analytic(_)).then(|| vec![0.0; l]);
        for i in 0..l {
            let dt = grid.point(i) - center;
            let x = dt / scale;
            let (v, d) = match (self, omega) {
                (Sampler::Analytic(Mother::Morlet { .. }), Some(w)) => {
                    let env = libm::exp(-0.5 * x * x);
                    let (s, c) = libm::sincos(w * grid.point(i));
                    (env * c, -x / scale * env * c - w * env * s)
                }
                (Sampler::Analytic(m), _) => (m.eval(x), m.derivative(x) / scale),
                (Sampler::Tabulated { prototype, center }, _) => {
                    (prototype.interpolate(x + center), 0.0)
                }
            };
            values[i] = flush(v);
            if let Some(der) = derivative.as_mut() {
                der[i] = flush(d);
            }
        }
        normalize_atom(values, derivative)
    }
}

#[inline]
fn flush(v: f64) -> f64 {
    if v.abs() < FLUSH_TO_ZERO {
        0.0
    } else {
        v
    }
}

fn normalize_atom(mut values: Vec<f64>, mut derivative: Option<Vec<f64>>) -> Result<SampledAtom> {
    let energy: f64 = values.iter().map(|v| v * v).sum();
    if !(energy >= MIN_ATOM_ENERGY) {
        return Err(Error::DegenerateAtom { energy });
    }
    let inv = 1.0 / libm::sqrt(energy);
    values.iter_mut().for_each(|v| *v *= inv);
    if let Some(d) = derivative.as_mut() {
        d.iter_mut().for_each(|v| *v *= inv);
    }
    Ok(SampledAtom { values, derivative })
}

/// Unit-energy sample of the dilated (`scale`) and shifted (`center` in
/// `[0, 1]`) mother atom of a continuous family or db6.
pub fn sample_atom(family: &Family, scale: f64, center: f64, grid: Grid) -> Result<SampledAtom> {
    Sampler::for_family(family)?.sample(scale, center, None, grid)
}

/// Central frequency (cycles per unit of the mother coordinate) of a
/// dilation family, from the peak of its energy spectrum.
pub fn central_frequency(family: &Family) -> Result<f64> {
    match family {
        Family::Dpss => Ok(DPSS_TIME_BANDWIDTH),
        _ => Ok(Sampler::for_family(family)?.prototype().central_frequency()),
    }
}

struct FrameBuilder {
    rows: Vec<Vec<f64>>,
    derivatives: Option<Vec<Vec<f64>>>,
    atoms: Vec<AtomInfo>,
}

impl FrameBuilder {
    fn new(analytic: bool) -> Self {
        Self { rows: Vec::new(), derivatives: analytic.then(Vec::new), atoms: Vec::new() }
    }

    fn push(&mut self, atom: SampledAtom, info: AtomInfo) {
        if let (Some(ds), Some(d)) = (self.derivatives.as_mut(), atom.derivative) {
            ds.push(d);
        }
        self.rows.push(atom.values);
        self.atoms.push(info);
    }

    fn finish(self, spec: &FrameSpec, unit_norm: bool) -> Result<FrameMatrix> {
        let matrix = Matrix::from_rows(&self.rows)?;
        let derivative = match self.derivatives {
            Some(d) if d.len() == self.rows.len() => Some(Matrix::from_rows(&d)?),
            _ => None,
        };
        FrameMatrix::from_parts(matrix, spec.clone(), self.atoms, unit_norm, false, derivative)
    }
}

/// Builds the frame described by `spec`.
pub fn build_frame(spec: &FrameSpec) -> Result<FrameMatrix> {
    spec.validate()?;
    let grid = Grid::new(spec.grid_len)?;
    match spec.family {
        Family::Legendre => build_legendre(spec, grid),
        Family::Dpss => build_dpss(spec, grid),
        _ => build_dilations(spec, grid),
    }
}

fn build_legendre(spec: &FrameSpec, grid: Grid) -> Result<FrameMatrix> {
    let n = spec.n_atoms;
    let l = grid.len();
    let mut rows = vec![vec![0.0; l]; n];
    let mut ders = vec![vec![0.0; l]; n];
    for i in 0..l {
        let (p, dp) = legendre::shifted_legendre_and_derivative(grid.point(i), n);
        for k in 0..n {
            rows[k][i] = p[k];
            ders[k][i] = dp[k];
        }
    }
    let unit_norm = spec.normalization == Normalization::UnitEnergy;
    let mut builder = FrameBuilder::new(true);
    for (k, (row, der)) in rows.into_iter().zip(ders).enumerate() {
        let atom = if unit_norm {
            normalize_atom(row, Some(der))?
        } else {
            SampledAtom { values: row, derivative: Some(der) }
        };
        let info = AtomInfo { scale: k as f64, center: 0.5, modulation: None, taper_order: None };
        builder.push(atom, info);
    }
    builder.finish(spec, unit_norm)
}

fn build_dilations(spec: &FrameSpec, grid: Grid) -> Result<FrameMatrix> {
    let sampler = Sampler::for_family(&spec.family)?;
    let prototype = sampler.prototype();
    let f_c = prototype.central_frequency();
    let spread = prototype.time_spread();
    let (freqs, scales) = scales_from_frequencies(spec.f_min, spec.f_max, spec.n_scales, f_c);
    let last = (grid.len() - 1) as f64;
    let widths: Vec<f64> = scales.iter().map(|s| s * spread * last).collect();
    let centers = allocate_shifts(&widths, spec.hop_factor, grid.len(), spec.n_atoms);

    let mut builder = FrameBuilder::new(spec.family.has_analytic_derivative());
    for (k, (scale, cs)) in scales.iter().zip(&centers).enumerate() {
        let omega = match spec.family {
            Family::Morlet => Some(spec.morlet_omegas.get(k).copied().unwrap_or(default_omega(freqs[k], grid))),
            _ => None,
        };
        for &c in cs {
            let center = c / last;
            let atom = sampler.sample(*scale, center, omega, grid)?;
            builder.push(atom, AtomInfo { scale: *scale, center, modulation: omega, taper_order: None });
        }
    }
    builder.finish(spec, true)
}

/// Default Morlet modulation for pseudo-frequency `f`.
pub fn default_omega(f: f64, grid: Grid) -> f64 {
    let l = grid.len() as f64;
    core::f64::consts::PI * f * l / (l - 1.0)
}

/// Energy-weighted standard deviation of a sampled window, in samples.
fn sample_spread(v: &[f64]) -> f64 {
    let (mut m0, mut m1) = (0.0, 0.0);
    for (i, x) in v.iter().enumerate() {
        m0 += x * x;
        m1 += x * x * i as f64;
    }
    let c = m1 / m0;
    let m2: f64 = v.iter().enumerate().map(|(i, x)| x * x * (i as f64 - c) * (i as f64 - c)).sum();
    libm::sqrt(m2 / m0)
}

fn build_dpss(spec: &FrameSpec, grid: Grid) -> Result<FrameMatrix> {
    let l = grid.len();
    let last = (l - 1) as f64;
    let (_, scales) = scales_from_frequencies(spec.f_min, spec.f_max, spec.n_scales, DPSS_TIME_BANDWIDTH);
    // One group per (window length, taper order).
    let mut groups: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    for (k, s) in scales.iter().enumerate() {
        let m = (libm::round(s * last) as usize).clamp(8, l);
        let w = spec.dpss_bandwidths.get(k).copied().unwrap_or(DPSS_TIME_BANDWIDTH / m as f64);
        let count = spec.dpss_tapers.min(m);
        for (order, taper) in dpss::dpss_tapers(m, w, count)?.into_iter().enumerate() {
            groups.push((*s, order, taper));
        }
    }
    let widths: Vec<f64> = groups.iter().map(|(_, _, t)| sample_spread(t)).collect();
    let centers = allocate_shifts(&widths, spec.hop_factor, l, spec.n_atoms);

    let mut builder = FrameBuilder::new(false);
    for ((scale, order, taper), cs) in groups.iter().zip(&centers) {
        let m = taper.len() as isize;
        for &c in cs {
            let start = libm::round(c - (m - 1) as f64 / 2.0) as isize;
            let mut values = vec![0.0; l];
            for (j, &v) in taper.iter().enumerate() {
                let idx = start + j as isize;
                if (0..l as isize).contains(&idx) {
                    values[idx as usize] = v;
                }
            }
            let atom = normalize_atom(values, None)?;
            let info = AtomInfo { scale: *scale, center: c / last, modulation: None, taper_order: Some(*order) };
            builder.push(atom, info);
        }
    }
    builder.finish(spec, true)
}

/// Whitens the row space: `F ← S^{-1/2} F`, followed by one refinement pass
/// when the first pass leaves `‖F Fᵀ − I‖_F > 1e-12`. Analytic derivatives
/// receive the same left factor.
pub fn tighten(frame: &FrameMatrix) -> Result<FrameMatrix> {
    let mut left = psd_inverse_sqrt(&frame.frame_operator())?;
    let mut f = left.matmul(&frame.matrix)?;
    let n = f.rows();
    let residual = f.gram_rows().sub(&Matrix::identity(n))?.frobenius_norm();
    if residual > 1e-12 {
        let refine = psd_inverse_sqrt(&f.gram_rows())?;
        f = refine.matmul(&f)?;
        left = refine.matmul(&left)?;
    }
    let derivative = match &frame.derivative {
        Some(d) => Some(left.matmul(d)?),
        None => None,
    };
    Ok(FrameMatrix {
        matrix: f,
        grid: frame.grid,
        spec: frame.spec.clone(),
        atoms: frame.atoms.clone(),
        unit_norm: false,
        tightened: true,
        derivative,
    })
}

/// Conditioning of `S = F Fᵀ`.
pub fn frame_diagnostics(frame: &FrameMatrix) -> Result<SpectrumReport> {
    spectrum(&frame.frame_operator())
}

/// Euclidean norms of the rows.
pub fn row_norms(m: &Matrix) -> Vec<f64> {
    (0..m.rows()).map(|i| norm2(m.row(i))).collect()
}
