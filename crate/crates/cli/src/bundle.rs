//! On-disk bundles: a directory holding `manifest.json` plus CSV payloads.
//!
//! The manifest checksum is FNV-1a 64 (hex) over the payload files, hashed
//! in the order the manifest lists them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavessm_core::frames::AtomInfo;
use wavessm_core::{FrameMatrix, FrameSpec, Matrix, Measure, SsmPair};

use crate::{csv, CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    Frame,
    Ssm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    pub unit_norm: bool,
    pub tightened: bool,
    pub analytic_derivative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub kind: BundleKind,
    pub format_version: u32,
    pub rows: usize,
    pub cols: usize,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<FrameSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomInfo>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Flags>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    /// Fingerprint of the frame an SSM was derived from, hex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_frame_id: Option<String>,
    pub payload: Vec<String>,
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bundle {
    Frame(FrameMatrix),
    Ssm(SsmPair),
}

fn hex(v: u64) -> String {
    format!("{v:016x}")
}

fn checksum(parts: &[String]) -> String {
    hex(wavessm_core::fnv1a64(parts.concat().as_bytes()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_bundle(dir: &Path, mut manifest: Manifest, files: Vec<(&str, String)>) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let texts: Vec<String> = files.iter().map(|(_, t)| t.clone()).collect();
    manifest.payload = files.iter().map(|(name, _)| name.to_string()).collect();
    manifest.checksum = checksum(&texts);
    for (name, text) in &files {
        write_file(&dir.join(name), text)?;
    }
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Schema(e.to_string()))?;
    write_file(&dir.join(MANIFEST), &(json + "\n"))?;
    Ok(manifest)
}

pub fn save_frame(frame: &FrameMatrix, dir: &Path) -> Result<Manifest> {
    let m = frame.matrix();
    let mut files = vec![("frame.csv", csv::render_matrix(m))];
    if let Some(d) = frame.analytic_derivative() {
        files.push(("derivative.csv", csv::render_matrix(d)));
    }
    let manifest = Manifest {
        kind: BundleKind::Frame,
        format_version: FORMAT_VERSION,
        rows: m.rows(),
        cols: m.cols(),
        rng_seed: frame.spec().rng_seed,
        spec: Some(frame.spec().clone()),
        atoms: Some(frame.atoms().to_vec()),
        flags: Some(Flags {
            unit_norm: frame.is_unit_norm(),
            tightened: frame.is_tightened(),
            analytic_derivative: frame.analytic_derivative().is_some(),
        }),
        measure: None,
        source_frame_id: None,
        payload: Vec::new(),
        checksum: String::new(),
    };
    write_bundle(dir, manifest, files)
}

pub fn save_ssm(pair: &SsmPair, rng_seed: u64, dir: &Path) -> Result<Manifest> {
    let b = Matrix::from_vec(pair.state_dim(), 1, pair.b().to_vec())?;
    let files = vec![("a.csv", csv::render_matrix(pair.a())), ("b.csv", csv::render_matrix(&b))];
    let manifest = Manifest {
        kind: BundleKind::Ssm,
        format_version: FORMAT_VERSION,
        rows: pair.state_dim(),
        cols: pair.state_dim(),
        rng_seed,
        spec: None,
        atoms: None,
        flags: None,
        measure: Some(pair.measure()),
        source_frame_id: Some(hex(pair.source_frame_id())),
        payload: Vec::new(),
        checksum: String::new(),
    };
    write_bundle(dir, manifest, files)
}

/// Parses and validates `manifest.json` without touching the payload.
pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = read_file(&path)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(CliError::Schema(format!("unsupported format_version {}", manifest.format_version)));
    }
    Ok(manifest)
}

fn missing(field: &str, kind: BundleKind) -> CliError {
    CliError::Schema(format!("{kind:?} manifest lacks `{field}`").to_lowercase())
}

fn payload_path(dir: &Path, name: &str) -> Result<PathBuf> {
    if name.contains(['/', '\\']) || name == ".." {
        return Err(CliError::Schema(format!("payload name `{name}` must be a plain file name")));
    }
    Ok(dir.join(name))
}

fn check_shape(m: &Matrix, rows: usize, cols: usize, path: &Path) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            message: format!("expected {rows}x{cols}, found {}x{}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

pub fn load_bundle(dir: &Path) -> Result<Bundle> {
    let manifest = read_manifest(dir)?;
    let mut texts = Vec::with_capacity(manifest.payload.len());
    for name in &manifest.payload {
        texts.push(read_file(&payload_path(dir, name)?)?);
    }
    let found = checksum(&texts);
    if found != manifest.checksum {
        return Err(CliError::ChecksumMismatch { expected: manifest.checksum.clone(), found });
    }
    let parsed: Vec<(PathBuf, Matrix)> = manifest
        .payload
        .iter()
        .zip(&texts)
        .map(|(name, text)| {
            let path = dir.join(name);
            csv::parse_matrix(text, &path).map(|m| (path, m))
        })
        .collect::<Result<_>>()?;
    let take = |name: &str| parsed.iter().zip(&manifest.payload).find(|(_, n)| *n == name).map(|(p, _)| p.clone());
    match manifest.kind {
        BundleKind::Frame => {
            let spec = manifest.spec.clone().ok_or_else(|| missing("spec", manifest.kind))?;
            let atoms = manifest.atoms.clone().ok_or_else(|| missing("atoms", manifest.kind))?;
            let flags = manifest.flags.clone().ok_or_else(|| missing("flags", manifest.kind))?;
            let (path, matrix) = take("frame.csv").ok_or_else(|| missing("frame.csv payload", manifest.kind))?;
            check_shape(&matrix, manifest.rows, manifest.cols, &path)?;
            let derivative = match take("derivative.csv") {
                Some((path, d)) => {
                    check_shape(&d, manifest.rows, manifest.cols, &path)?;
                    Some(d)
                }
                None => None,
            };
            if derivative.is_some() != flags.analytic_derivative {
                return Err(CliError::Schema("flags.analytic_derivative disagrees with the payload".into()));
            }
            let frame = FrameMatrix::from_parts(matrix, spec, atoms, flags.unit_norm, flags.tightened, derivative)?;
            Ok(Bundle::Frame(frame))
        }
        BundleKind::Ssm => {
            let measure = manifest.measure.ok_or_else(|| missing("measure", manifest.kind))?;
            let id = manifest.source_frame_id.as_deref().ok_or_else(|| missing("source_frame_id", manifest.kind))?;
            let id = u64::from_str_radix(id, 16).map_err(|_| CliError::Schema(format!("bad source_frame_id `{id}`")))?;
            let (path, a) = take("a.csv").ok_or_else(|| missing("a.csv payload", manifest.kind))?;
            check_shape(&a, manifest.rows, manifest.cols, &path)?;
            let (path, b) = take("b.csv").ok_or_else(|| missing("b.csv payload", manifest.kind))?;
            check_shape(&b, manifest.rows, 1, &path)?;
            Ok(Bundle::Ssm(SsmPair::from_parts(a, b.into_vec(), measure, id)?))
        }
    }
}

pub fn load_frame(dir: &Path) -> Result<FrameMatrix> {
    match load_bundle(dir)? {
        Bundle::Frame(f) => Ok(f),
        Bundle::Ssm(_) => Err(CliError::Schema(format!("{} holds an ssm, not a frame", dir.display()))),
    }
}

pub fn load_ssm(dir: &Path) -> Result<SsmPair> {
    match load_bundle(dir)? {
        Bundle::Ssm(p) => Ok(p),
        Bundle::Frame(_) => Err(CliError::Schema(format!("{} holds a frame, not an ssm", dir.display()))),
    }
}
