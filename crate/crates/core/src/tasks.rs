//! Continuous window copying task with a linear decode from the final state.
//!
//! The evaluator knows the window locations; it runs the frame-derived SSM
//! over the signal channel, decodes the final state through the dual frame
//! and scores the decoded samples inside the marked windows.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::frames::FrameMatrix;
use crate::safari::{derive_scaled, derive_translated, Measure, MeasureKind, SsmPair};
use crate::ssm::{bilinear_discretize, decode_state, jacobian, run, DIVERGENCE_LIMIT};
use crate::{Error, Result};

pub const DEFAULT_LENGTH: usize = 4000;
pub const DEFAULT_WINDOW_LEN: usize = 25;
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CopyTaskInstance {
    pub signal: Vec<f64>,
    /// `+1` at each window start, `-1` one past each window end.
    pub markers: Vec<f64>,
    /// Sorted, disjoint `(start, length)` pairs.
    pub windows: Vec<(usize, usize)>,
    /// Elementwise sum of the windowed segments.
    pub target: Vec<f64>,
    pub seed: u64,
}

impl CopyTaskInstance {
    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    /// Sum of the windowed segments of `x`.
    pub fn sum_windows(&self, x: &[f64]) -> Vec<f64> {
        let d = self.windows.first().map_or(0, |w| w.1);
        let mut out = vec![0.0; d];
        for &(start, _) in &self.windows {
            for (o, v) in out.iter_mut().zip(&x[start..start + d]) {
                *o += v;
            }
        }
        out
    }
}

/// Draws `count` windows of length `d` uniformly, without overlap, at least one
/// sample apart and away from both ends, then a standard normal signal.
pub fn gen_copy_task(t: usize, count: usize, d: usize, seed: u64) -> Result<CopyTaskInstance> {
    if d == 0 && count > 0 {
        return Err(Error::InvalidParameter("window length must be positive".into()));
    }
    if count * d + count > t || (count > 0 && d + 2 > t) {
        return Err(Error::Infeasible { attempts: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut windows: Vec<(usize, usize)> = Vec::with_capacity(count);
    let mut attempts = 0;
    // Valid starts: 1 ..= t - d - 1.
    let span = (t - d - 1) as u64;
    while windows.len() < count {
        if attempts == MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::Infeasible { attempts });
        }
        attempts += 1;
        let start = 1 + (rng.next_u64() % span) as usize;
        let clear = windows.iter().all(|&(s, _)| start + d < s || s + d < start);
        if clear {
            windows.push((start, d));
        }
    }
    windows.sort_unstable();
    let signal: Vec<f64> = (0..t).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut markers = vec![0.0; t];
    for &(s, len) in &windows {
        markers[s] = 1.0;
        markers[s + len] = -1.0;
    }
    let mut instance = CopyTaskInstance { signal, markers, windows, target: Vec::new(), seed };
    instance.target = instance.sum_windows(&instance.signal);
    Ok(instance)
}

/// Scores of one decoded instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopyScore {
    /// Mean squared error of the decoded samples over the union of windows.
    pub window_mse: f64,
    /// Mean squared error of the summed decoded windows against the target.
    pub target_mse: f64,
}

/// Scores a decoded signal `x` against an instance.
pub fn score(instance: &CopyTaskInstance, x: &[f64]) -> CopyScore {
    let mut sq = 0.0;
    let mut count = 0usize;
    for &(s, len) in &instance.windows {
        for i in s..s + len {
            sq += square(x[i] - instance.signal[i]);
            count += 1;
        }
    }
    let window_mse = if count == 0 { 0.0 } else { sq / count as f64 };
    let estimate = instance.sum_windows(x);
    let target_mse = if estimate.is_empty() {
        0.0
    } else {
        estimate.iter().zip(&instance.target).map(|(a, b)| square(a - b)).sum::<f64>() / estimate.len() as f64
    };
    CopyScore { window_mse, target_mse }
}

/// Pair for the chosen measure.
pub fn derive_pair(frame: &FrameMatrix, measure: Measure) -> Result<SsmPair> {
    match measure.kind {
        MeasureKind::Scaled => derive_scaled(frame),
        MeasureKind::Translated => derive_translated(frame, measure.theta),
    }
}

fn check_grid(frame: &FrameMatrix, t: usize) -> Result<()> {
    if frame.grid().len() != t {
        return Err(Error::DimensionMismatch { expected: (frame.n_atoms(), t), found: frame.matrix().shape() });
    }
    Ok(())
}

/// Runs the SSM on the signal channel and scores the decoded final state.
/// The frame grid must have one point per time step, so that decoded sample
/// `i` lines up with input `i` when `Δ = θ / (T - 1)`.
pub fn eval_reconstruction(
    frame: &FrameMatrix,
    measure: Measure,
    delta: f64,
    instance: &CopyTaskInstance,
) -> Result<CopyScore> {
    check_grid(frame, instance.len())?;
    let ssm = bilinear_discretize(&derive_pair(frame, measure)?, delta)?;
    let h = run(&ssm, &instance.signal, None)?.final_state;
    Ok(score(instance, &decode_state(&h, frame)?))
}

/// Shared settings of a frame comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyConfig {
    pub length: usize,
    pub window_len: usize,
    pub measure: Measure,
    /// `None` means `θ / (T - 1)`.
    pub delta: Option<f64>,
}

impl Default for CopyConfig {
    fn default() -> Self {
        Self { length: DEFAULT_LENGTH, window_len: DEFAULT_WINDOW_LEN, measure: Measure::scaled(), delta: None }
    }
}

impl CopyConfig {
    pub fn step(&self) -> f64 {
        self.delta.unwrap_or(self.measure.theta / (self.length - 1) as f64)
    }
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskRow {
    pub family: String,
    pub measure: MeasureKind,
    pub n: usize,
    pub windows: usize,
    pub seeds: usize,
    /// Seeds whose state diverged; excluded from the statistics.
    pub divergent: usize,
    pub window_mse_mean: f64,
    pub window_mse_std: f64,
    pub target_mse_mean: f64,
    pub target_mse_std: f64,
}

#[inline]
fn square(x: f64) -> f64 {
    x * x
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| square(v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, libm::sqrt(var))
}

/// Mean and sample standard deviation of the scores per (frame, W) over
/// seeds. Rows follow the order of `frames`, then of `window_counts`.
///
/// The final state is formed as `G u` with the Jacobian `G`, computed once
/// per frame; by linearity this equals running the recurrence.
pub fn compare_frames(
    frames: &[FrameMatrix],
    window_counts: &[usize],
    seeds: &[u64],
    config: &CopyConfig,
) -> Result<Vec<TaskRow>> {
    let mut rows = Vec::with_capacity(frames.len() * window_counts.len());
    for frame in frames {
        check_grid(frame, config.length)?;
        let ssm = bilinear_discretize(&derive_pair(frame, config.measure)?, config.step())?;
        let g = jacobian(&ssm, config.length)?;
        let stable = g.as_slice().iter().all(|v| v.is_finite() && v.abs() <= DIVERGENCE_LIMIT);
        for &w in window_counts {
            let mut window_mse = Vec::with_capacity(seeds.len());
            let mut target_mse = Vec::with_capacity(seeds.len());
            let mut divergent = 0;
            for &seed in seeds {
                let instance = gen_copy_task(config.length, w, config.window_len, seed)?;
                let h = g.mul_vec(&instance.signal);
                if !stable || h.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
                    divergent += 1;
                    continue;
                }
                let s = score(&instance, &decode_state(&h, frame)?);
                window_mse.push(s.window_mse);
                target_mse.push(s.target_mse);
            }
            let (wm, ws) = mean_std(&window_mse);
            let (tm, ts) = mean_std(&target_mse);
            rows.push(TaskRow {
                family: alloc::format!("{}", frame.spec().family),
                measure: config.measure.kind,
                n: frame.n_atoms(),
                windows: w,
                seeds: seeds.len(),
                divergent,
                window_mse_mean: wm,
                window_mse_std: ws,
                target_mse_mean: tm,
                target_mse_std: ts,
            });
        }
    }
    Ok(rows)
}
