//! Command-line surface for `wavessm-core`: bundles, run configs, CSV
//! emission and the subcommand implementations.

pub mod bundle;
pub mod commands;
pub mod config;
pub mod csv;
mod error;

pub use error::{CliError, Result};

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "WAVESSM_OUT";
