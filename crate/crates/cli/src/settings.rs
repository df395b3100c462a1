//! Optional TOML config file for `simulate` and `experiment`. Keys use the
//! flag names; a flag given on the command line wins over the file.

use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileSettings {
    pub sample: Option<usize>,
    pub runs: Option<usize>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub beta_factor: Option<f64>,
    pub tmax: Option<u32>,
    pub coverage: Option<f64>,
    pub threshold: Option<f64>,
    pub master_seed: Option<u64>,
    pub alpha: Option<f64>,
    pub level: Option<f64>,
    pub metrics: Option<Vec<String>>,
    pub spearman: Option<bool>,
    pub log_outcomes: Option<bool>,
    pub run_to_horizon: Option<bool>,
}

impl FileSettings {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        toml::from_str(&text).map_err(|e| {
            // toml messages span several lines; keep the first
            let first = e.message().lines().next().unwrap_or_default().to_owned();
            match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    anyhow::anyhow!("{}: line {line}: {first}", path.display())
                }
                None => anyhow::anyhow!("{}: {first}", path.display()),
            }
        })
    }
}

/// `flag`, else the file's value, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Boolean switches: set by either source.
pub fn switch(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}
