//! Subcommand definitions and their implementations.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wavessm_core::approx::{
    build_cwt_dictionary, default_levels, dwt_threshold_n, legendre_best_n, legendre_project, omp_approx, rate_slope,
    CwtParams, TestSignal, DEFAULT_RIDGE, MAX_CEILING,
};
use wavessm_core::frames::{frame_diagnostics, Normalization};
use wavessm_core::numerics::spectral_norm_dense;
use wavessm_core::safari::MeasureKind;
use wavessm_core::ssm::{default_delta, jacobian, kernel, locality_profile, DIVERGENCE_LIMIT};
use wavessm_core::tasks::{compare_frames, derive_pair, CopyConfig, TaskRow};
use wavessm_core::{bilinear_discretize, build_frame, tighten, Family, FrameMatrix, FrameSpec, Grid, Measure, SsmPair};

use crate::config::RunConfig;
use crate::csv::{self, format_f64};
use crate::{bundle, CliError, Result, OUT_ENV};

#[derive(Debug, Parser)]
#[command(name = "wavessm", version, about = "Wavelet-frame state space models", arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a frame and save it as a bundle.
    BuildFrame(BuildFrameArgs),
    /// Derive continuous (A, B) from a frame and save it as a bundle.
    DeriveSsm(DeriveArgs),
    /// Convolution kernel K[l] = Ā^l B̄ as CSV.
    Kernel(DynamicsArgs),
    /// Final-state Jacobian and per-state locality as CSV.
    Jacobian(DynamicsArgs),
    /// N-term approximation errors and log-log slopes.
    ApproxSweep(ApproxArgs),
    /// Windowed copy task with a linear dual-frame readout.
    CopyTask(CopyArgs),
    /// Frame-operator conditioning, raw and tightened.
    Diagnostics(DiagnosticsArgs),
    /// Run a subcommand described by a JSON config file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory; WAVESSM_OUT takes precedence when set.
    #[arg(long, default_value = "wavessm_out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Common {
    pub fn out_dir(&self) -> Result<PathBuf> {
        let dir = match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.out.clone(),
        };
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Unit,
    Native,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Scaled,
    Translated,
}

#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    #[arg(long, default_value = "morlet")]
    pub family: Family,
    #[arg(long = "N", default_value_t = 64)]
    pub n: usize,
    #[arg(long = "L", default_value_t = 2048)]
    pub l: usize,
    #[arg(long, value_enum, default_value = "on")]
    pub tighten: Toggle,
    #[arg(long, value_enum, default_value = "unit")]
    pub normalization: NormArg,
    #[arg(long)]
    pub f_min: Option<f64>,
    #[arg(long)]
    pub f_max: Option<f64>,
    #[arg(long)]
    pub n_scales: Option<usize>,
    #[arg(long)]
    pub hop_factor: Option<f64>,
}

impl FrameArgs {
    pub fn spec(&self, seed: u64) -> FrameSpec {
        let normalization = match self.normalization {
            NormArg::Unit => Normalization::UnitEnergy,
            NormArg::Native => Normalization::Native,
        };
        let mut spec = FrameSpec::new(self.family, self.n, self.l).with_normalization(normalization);
        spec.rng_seed = seed;
        if let Some(v) = self.f_min {
            spec.f_min = v;
        }
        if let Some(v) = self.f_max {
            spec.f_max = v;
        }
        if let Some(v) = self.n_scales {
            spec.n_scales = v;
        }
        if let Some(v) = self.hop_factor {
            spec.hop_factor = v;
        }
        spec
    }

    pub fn build(&self, seed: u64) -> Result<FrameMatrix> {
        let raw = build_frame(&self.spec(seed))?;
        Ok(match self.tighten {
            Toggle::On => tighten(&raw)?,
            Toggle::Off => raw,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildFrameArgs {
    #[command(flatten)]
    pub frame: FrameArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DeriveArgs {
    /// Frame bundle to derive from; otherwise the frame flags are used.
    #[arg(long)]
    pub frame_bundle: Option<PathBuf>,
    #[command(flatten)]
    pub frame: FrameArgs,
    #[arg(long, value_enum, default_value = "translated")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[command(flatten)]
    pub common: Common,
}

impl DeriveArgs {
    fn measure(&self) -> Result<Measure> {
        Ok(match self.measure {
            MeasureArg::Scaled => Measure::scaled(),
            MeasureArg::Translated => Measure::translated(self.theta)?,
        })
    }

    fn frame(&self) -> Result<FrameMatrix> {
        match &self.frame_bundle {
            Some(dir) => bundle::load_frame(dir),
            None => self.frame.build(self.common.seed),
        }
    }

    fn pair(&self) -> Result<(FrameMatrix, SsmPair)> {
        let frame = self.frame()?;
        let pair = derive_pair(&frame, self.measure()?)?;
        Ok((frame, pair))
    }
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    /// SSM bundle; otherwise the pair is derived from the frame flags.
    #[arg(long)]
    pub ssm_bundle: Option<PathBuf>,
    #[command(flatten)]
    pub derive: DeriveArgs,
    /// Sequence length.
    #[arg(long = "T", default_value_t = 256)]
    pub t: usize,
    /// Step size; drawn log-uniformly from [0.001, 0.1] by seed when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
}

impl DynamicsArgs {
    fn pair(&self) -> Result<SsmPair> {
        match &self.ssm_bundle {
            Some(dir) => bundle::load_ssm(dir),
            None => Ok(self.derive.pair()?.1),
        }
    }

    fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(self.derive.common.seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalArg {
    #[value(name = "one_step", alias = "one-step")]
    OneStep,
    #[value(name = "two_step", alias = "two-step")]
    TwoStep,
    Star,
}

impl SignalArg {
    fn name(self) -> &'static str {
        match self {
            SignalArg::OneStep => "one_step",
            SignalArg::TwoStep => "two_step",
            SignalArg::Star => "star",
        }
    }

    fn sample(self, grid: Grid) -> TestSignal {
        match self {
            SignalArg::OneStep => TestSignal::one_step(grid),
            SignalArg::TwoStep => TestSignal::two_step(grid),
            SignalArg::Star => TestSignal::star(grid),
        }
    }
}

/// `legendre`, `db6` or `omp:<family>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    Legendre,
    Db6,
    Omp(Family),
}

impl SweepMethod {
    fn name(self) -> &'static str {
        match self {
            SweepMethod::Legendre => "legendre",
            SweepMethod::Db6 => "dwt",
            SweepMethod::Omp(_) => "omp",
        }
    }

    fn family(self) -> String {
        match self {
            SweepMethod::Legendre => "legendre".into(),
            SweepMethod::Db6 => "db6".into(),
            SweepMethod::Omp(f) => f.to_string(),
        }
    }
}

impl FromStr for SweepMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "legendre" => Ok(SweepMethod::Legendre),
            "db6" | "dwt" => Ok(SweepMethod::Db6),
            other => match other.strip_prefix("omp:") {
                Some(f) => {
                    let family: Family = f.parse().map_err(|e| format!("{e}"))?;
                    if family.mother().is_none() {
                        return Err(format!("omp needs a continuous mother wavelet, not `{f}`"));
                    }
                    Ok(SweepMethod::Omp(family))
                }
                None => Err(format!("unknown method `{other}` (legendre, db6, omp:<family>)")),
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "one_step,two_step")]
    pub signals: Vec<SignalArg>,
    #[arg(long, value_delimiter = ',', default_value = "legendre,db6,omp:mexh")]
    pub methods: Vec<SweepMethod>,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
    pub budgets: Vec<usize>,
    #[arg(long = "L", default_value_t = 2048)]
    pub l: usize,
    /// DWT depth; the deepest level keeping a full filter when absent.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    pub ridge: f64,
    /// Number of Legendre coefficients computed before selecting the best N.
    #[arg(long, default_value_t = MAX_CEILING)]
    pub ceiling: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CopyArgs {
    #[arg(long, value_delimiter = ',', default_value = "morlet,gauss,mexhat,dpss,db6,legendre")]
    pub families: Vec<Family>,
    #[arg(long = "N", default_value_t = 128)]
    pub n: usize,
    #[arg(long = "T", default_value_t = 4000)]
    pub t: usize,
    /// Window length.
    #[arg(long = "D", default_value_t = 25)]
    pub d: usize,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15")]
    pub windows: Vec<usize>,
    /// Number of seeds, starting at `--seed`.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value = "translated")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Step size; θ/(T − 1) when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value = "on")]
    pub tighten: Toggle,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TightenMode {
    Off,
    On,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnosticsArgs {
    #[arg(long, value_delimiter = ',', default_value = "morlet")]
    pub family: Vec<Family>,
    #[arg(long = "N", value_delimiter = ',', default_value = "16,32,64,128")]
    pub n: Vec<usize>,
    #[arg(long = "L", default_value_t = 2048)]
    pub l: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub tighten: TightenMode,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON document: {"command": ..., "rng_seed": ..., "output_dir": ..., flags...}.
    #[arg(long)]
    pub config: PathBuf,
}

pub fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::BuildFrame(a) => build_frame_cmd(&a),
        Command::DeriveSsm(a) => derive_ssm_cmd(&a),
        Command::Kernel(a) => kernel_cmd(&a),
        Command::Jacobian(a) => jacobian_cmd(&a),
        Command::ApproxSweep(a) => approx_sweep_cmd(&a),
        Command::CopyTask(a) => copy_task_cmd(&a),
        Command::Diagnostics(a) => diagnostics_cmd(&a),
        Command::Run(a) => {
            let argv = RunConfig::load(&a.config)?.to_argv()?;
            let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
            if matches!(cli.command, Command::Run(_)) {
                return Err(CliError::Schema("a config may not invoke `run`".into()));
            }
            dispatch(cli.command)
        }
    }
}

fn frame_dir_name(frame: &FrameMatrix) -> String {
    let spec = frame.spec();
    format!("frame_{}_N{}_L{}", spec.family, spec.n_atoms, spec.grid_len)
}

fn measure_name(m: Measure) -> &'static str {
    match m.kind {
        MeasureKind::Scaled => "scaled",
        MeasureKind::Translated => "translated",
    }
}

fn build_frame_cmd(args: &BuildFrameArgs) -> Result<String> {
    let frame = args.frame.build(args.common.seed)?;
    let dir = args.common.out_dir()?.join(frame_dir_name(&frame));
    bundle::save_frame(&frame, &dir)?;
    let report = frame_diagnostics(&frame)?;
    Ok(format!(
        "build-frame: {} N={} L={} tightened={} kappa={:.6e} -> {}",
        frame.spec().family,
        frame.n_atoms(),
        frame.grid().len(),
        frame.is_tightened(),
        report.condition_number,
        dir.display()
    ))
}

fn derive_ssm_cmd(args: &DeriveArgs) -> Result<String> {
    let (frame, pair) = args.pair()?;
    let name = format!("ssm_{}_{}", measure_name(pair.measure()), frame_dir_name(&frame).trim_start_matches("frame_"));
    let dir = args.common.out_dir()?.join(name);
    bundle::save_ssm(&pair, args.common.seed, &dir)?;
    let norm = spectral_norm_dense(pair.a())?;
    Ok(format!(
        "derive-ssm: {} {} N={} |A|_2={:.6e} -> {}",
        frame.spec().family,
        measure_name(pair.measure()),
        pair.state_dim(),
        norm,
        dir.display()
    ))
}

/// Reports the first lag whose entries left the divergence guard.
fn check_divergence<'a>(columns: impl Iterator<Item = &'a [f64]>) -> Result<()> {
    for (step, col) in columns.enumerate() {
        let magnitude = col.iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
        if magnitude > DIVERGENCE_LIMIT {
            return Err(wavessm_core::Error::Overflow { step, magnitude }.into());
        }
    }
    Ok(())
}

fn kernel_cmd(args: &DynamicsArgs) -> Result<String> {
    let pair = args.pair()?;
    let ssm = bilinear_discretize(&pair, args.delta())?;
    let k = kernel(&ssm, args.t, None)?;
    check_divergence(k.iter().map(Vec::as_slice))?;
    let mut header = vec!["lag".to_string()];
    header.extend((0..ssm.state_dim()).map(|i| format!("k{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = k
        .iter()
        .enumerate()
        .map(|(l, v)| std::iter::once(l.to_string()).chain(v.iter().map(|x| format_f64(*x))).collect())
        .collect();
    let path = args.derive.common.out_dir()?.join("kernel.csv");
    csv::write(&path, &header, &rows)?;
    Ok(format!(
        "kernel: N={} T={} delta={:.6e} rho={:.6} -> {}",
        ssm.state_dim(),
        args.t,
        ssm.delta(),
        ssm.spectral_radius(),
        path.display()
    ))
}

fn jacobian_cmd(args: &DynamicsArgs) -> Result<String> {
    let pair = args.pair()?;
    let ssm = bilinear_discretize(&pair, args.delta())?;
    let g = jacobian(&ssm, args.t)?;
    let columns: Vec<Vec<f64>> = (0..args.t).rev().map(|t| g.column(t)).collect();
    check_divergence(columns.iter().map(Vec::as_slice))?;
    let out = args.derive.common.out_dir()?;
    let mut header = vec!["state".to_string()];
    header.extend((0..args.t).map(|t| format!("t{t}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..g.rows())
        .map(|i| std::iter::once(i.to_string()).chain(g.row(i).iter().map(|x| format_f64(*x))).collect())
        .collect();
    let path = out.join("jacobian.csv");
    csv::write(&path, &header, &rows)?;
    let profile = locality_profile(&g);
    let rows: Vec<Vec<String>> =
        profile.widths.iter().enumerate().map(|(i, w)| vec![i.to_string(), w.to_string()]).collect();
    csv::write(&out.join("locality.csv"), &["state", "width90"], &rows)?;
    Ok(format!(
        "jacobian: N={} T={} delta={:.6e} mean_width90={:.3} -> {}",
        ssm.state_dim(),
        args.t,
        ssm.delta(),
        profile.mean_width,
        path.display()
    ))
}

fn sweep_errors(method: SweepMethod, signal: &TestSignal, args: &ApproxArgs) -> Result<Vec<f64>> {
    let grid = signal.grid;
    match method {
        SweepMethod::Legendre => {
            let coeffs = legendre_project(signal, args.ceiling, args.ceiling.div_ceil(2).max(1))?;
            args.budgets.iter().map(|&n| Ok(legendre_best_n(signal, n, &coeffs)?.error)).collect()
        }
        SweepMethod::Db6 => {
            let levels = args.levels.unwrap_or_else(|| default_levels(grid.len()));
            args.budgets.iter().map(|&n| Ok(dwt_threshold_n(&signal.samples, n, levels, grid)?.error)).collect()
        }
        SweepMethod::Omp(family) => {
            let dict = build_cwt_dictionary(&family, CwtParams::defaults(grid), grid)?;
            args.budgets.iter().map(|&n| Ok(omp_approx(&dict, &signal.samples, n, args.ridge)?.error)).collect()
        }
    }
}

fn approx_sweep_cmd(args: &ApproxArgs) -> Result<String> {
    if args.budgets.is_empty() || args.signals.is_empty() || args.methods.is_empty() {
        return Err(CliError::Usage("signals, methods and budgets must be non-empty".into()));
    }
    let grid = Grid::new(args.l)?;
    let jobs: Vec<(SignalArg, SweepMethod)> =
        args.signals.iter().flat_map(|s| args.methods.iter().map(move |m| (*s, *m))).collect();
    let results: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(s, m)| scope.spawn(move || sweep_errors(*m, &s.sample(grid), args)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for ((signal, method), errors) in jobs.iter().zip(results) {
        let errors = errors?;
        let slope = if args.budgets.len() >= 3 { rate_slope(&args.budgets, &errors).unwrap_or(f64::NAN) } else { f64::NAN };
        slopes.push(format!("{}/{}:{}={:.3}", signal.name(), method.name(), method.family(), slope));
        for (n, e) in args.budgets.iter().zip(&errors) {
            rows.push(vec![
                signal.name().to_string(),
                method.name().to_string(),
                method.family(),
                n.to_string(),
                format_f64(*e),
                format_f64(slope),
            ]);
        }
    }
    let path = args.common.out_dir()?.join("approx_sweep.csv");
    csv::write(&path, &["signal", "method", "family", "N", "error", "slope"], &rows)?;
    Ok(format!("approx-sweep: {} rows, slopes {} -> {}", rows.len(), slopes.join(" "), path.display()))
}

#[derive(Serialize)]
struct CopyReport<'a> {
    readout: &'a str,
    families: Vec<String>,
    n: usize,
    t: usize,
    d: usize,
    windows: &'a [usize],
    seeds: Vec<u64>,
    measure: Measure,
    delta: f64,
    tightened: bool,
}

const COPY_READOUT: &str = "untrained linear readout: final state decoded through the dual frame, \
     windows summed from the decoded history";

fn copy_task_cmd(args: &CopyArgs) -> Result<String> {
    let measure = match args.measure {
        MeasureArg::Scaled => Measure::scaled(),
        MeasureArg::Translated => Measure::translated(args.theta)?,
    };
    let config = CopyConfig { length: args.t, window_len: args.d, measure, delta: args.delta };
    let seeds: Vec<u64> = (0..args.seeds).map(|k| args.common.seed + k).collect();
    let frame_args = |family: Family| FrameArgs {
        family,
        n: args.n,
        l: args.t,
        tighten: args.tighten,
        normalization: NormArg::Unit,
        f_min: None,
        f_max: None,
        n_scales: None,
        hop_factor: None,
    };
    let results: Vec<Result<Vec<TaskRow>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .families
            .iter()
            .map(|&family| {
                let (config, seeds, fa) = (&config, &seeds, frame_args(family));
                scope.spawn(move || {
                    let frame = fa.build(args.common.seed)?;
                    Ok(compare_frames(&[frame], &args.windows, seeds, config)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("copy-task worker panicked")).collect()
    });
    let mut table = Vec::new();
    for r in results {
        table.extend(r?);
    }
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                r.family.clone(),
                measure_name(Measure { kind: r.measure, theta: args.theta }).to_string(),
                r.n.to_string(),
                r.windows.to_string(),
                r.seeds.to_string(),
                r.divergent.to_string(),
                format_f64(r.window_mse_mean),
                format_f64(r.window_mse_std),
                format_f64(r.target_mse_mean),
                format_f64(r.target_mse_std),
            ]
        })
        .collect();
    let out = args.common.out_dir()?;
    let path = out.join("copy_task.csv");
    csv::write(
        &path,
        &[
            "family",
            "measure",
            "N",
            "W",
            "seeds",
            "divergent",
            "window_mse_mean",
            "window_mse_std",
            "target_mse_mean",
            "target_mse_std",
        ],
        &rows,
    )?;
    let report = CopyReport {
        readout: COPY_READOUT,
        families: args.families.iter().map(|f| f.to_string()).collect(),
        n: args.n,
        t: args.t,
        d: args.d,
        windows: &args.windows,
        seeds: seeds.clone(),
        measure,
        delta: config.step(),
        tightened: args.tighten == Toggle::On,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Schema(e.to_string()))? + "\n";
    let meta = out.join("copy_task.json");
    std::fs::write(&meta, json).map_err(|e| CliError::io(&meta, e))?;
    let diverged: usize = table.iter().map(|r| r.divergent).sum();
    if diverged > 0 && table.iter().all(|r| r.divergent == r.seeds) {
        return Err(wavessm_core::Error::Overflow { step: args.t, magnitude: f64::INFINITY }.into());
    }
    Ok(format!(
        "copy-task: {} families x {} window counts, {} seeds, {} divergent runs -> {}",
        args.families.len(),
        args.windows.len(),
        seeds.len(),
        diverged,
        path.display()
    ))
}

fn diagnostics_cmd(args: &DiagnosticsArgs) -> Result<String> {
    let jobs: Vec<(Family, usize)> =
        args.family.iter().flat_map(|f| args.n.iter().map(move |n| (*f, *n))).collect();
    let results: Vec<Result<Vec<Vec<String>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(family, n)| {
                scope.spawn(move || {
                    let raw = build_frame(&FrameSpec { rng_seed: args.common.seed, ..FrameSpec::new(family, n, args.l) })?;
                    let mut variants = Vec::new();
                    if args.tighten != TightenMode::On {
                        variants.push(("raw", frame_diagnostics(&raw)?));
                    }
                    if args.tighten != TightenMode::Off {
                        variants.push(("tightened", frame_diagnostics(&tighten(&raw)?)?));
                    }
                    Ok(variants
                        .into_iter()
                        .map(|(name, r)| {
                            vec![
                                family.to_string(),
                                n.to_string(),
                                args.l.to_string(),
                                name.to_string(),
                                format_f64(r.lambda_min),
                                format_f64(r.lambda_max),
                                format_f64(r.condition_number),
                            ]
                        })
                        .collect())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("diagnostics worker panicked")).collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let path = args.common.out_dir()?.join("diagnostics.csv");
    csv::write(&path, &["family", "N", "L", "variant", "lambda_min", "lambda_max", "kappa"], &rows)?;
    Ok(format!("diagnostics: {} rows -> {}", rows.len(), path.display()))
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
