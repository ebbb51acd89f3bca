//! Flat JSON run configurations, translated into command-line flags.
//!
//! ```json
//! {"command": "diagnostics", "rng_seed": 0, "output_dir": "out",
//!  "family": "morlet", "N": [16, 32, 64], "L": 2048, "tighten": "both"}
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::CommandFactory;
use serde_json::Value;

use crate::commands::Cli;
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub rng_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    /// Remaining keys, one per command flag (`N`, `f_min`, ...).
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        let Value::Object(mut map) = value else {
            return Err(CliError::Schema("run config must be a JSON object".into()));
        };
        let command = match map.remove("command") {
            Some(Value::String(s)) => s,
            Some(_) => return Err(CliError::Schema("`command` must be a string".into())),
            None => return Err(CliError::Schema("missing key `command`".into())),
        };
        let rng_seed = match map.remove("rng_seed") {
            None => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Schema("`rng_seed` must be a non-negative integer".into()))?),
        };
        let output_dir = match map.remove("output_dir") {
            None => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => return Err(CliError::Schema("`output_dir` must be a string".into())),
        };
        let config = Self { command, rng_seed, output_dir, params: map.into_iter().collect() };
        config.flag_names()?;
        Ok(config)
    }

    /// Maps every parameter key onto a long flag of the command, rejecting
    /// unknown keys.
    fn flag_names(&self) -> Result<Vec<(String, &Value)>> {
        let cli = Cli::command();
        let sub = cli
            .get_subcommands()
            .find(|c| c.get_name() == self.command && c.get_name() != "run")
            .ok_or_else(|| CliError::Schema(format!("unknown command `{}`", self.command)))?;
        let longs: Vec<&str> = sub.get_arguments().filter_map(|a| a.get_long()).collect();
        self.params
            .iter()
            .map(|(key, value)| {
                let flag = key.replace('_', "-");
                if matches!(flag.as_str(), "seed" | "out") || !longs.contains(&flag.as_str()) {
                    return Err(CliError::Schema(format!("unknown key `{key}` for command `{}`", self.command)));
                }
                Ok((flag, value))
            })
            .collect()
    }

    /// `argv` equivalent to this config, starting with the program name.
    pub fn to_argv(&self) -> Result<Vec<String>> {
        let mut argv = vec!["wavessm".to_string(), self.command.clone()];
        if let Some(seed) = self.rng_seed {
            argv.extend(["--seed".to_string(), seed.to_string()]);
        }
        if let Some(dir) = &self.output_dir {
            argv.extend(["--out".to_string(), dir.display().to_string()]);
        }
        for (flag, value) in self.flag_names()? {
            argv.push(format!("--{flag}"));
            argv.push(scalar_list(&flag, value)?);
        }
        Ok(argv)
    }
}

fn scalar(flag: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(CliError::Schema(format!("value of `{flag}` must be a string, number, boolean or list"))),
    }
}

fn scalar_list(flag: &str, v: &Value) -> Result<String> {
    match v {
        Value::Array(items) => Ok(items.iter().map(|i| scalar(flag, i)).collect::<Result<Vec<_>>>()?.join(",")),
        other => scalar(flag, other),
    }
}
