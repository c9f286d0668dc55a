use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use crate::args::{CriterionArg, Format, ModelKind, Units};

/// Contents of a `--config` file. Every key is optional and is overridden by
/// the matching command-line flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelKind>,
    pub order: Option<usize>,
    pub k_max: Option<usize>,
    pub criterion: Option<CriterionArg>,
    pub alphabet_x: Option<usize>,
    pub alphabet_y: Option<usize>,
    pub alphabet_z: Option<usize>,
    pub alpha: Option<f64>,
    pub units: Option<Units>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub header: Option<bool>,
    pub delimiter: Option<char>,
    pub bins: Option<usize>,
    pub demean: Option<bool>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

/// Flag, then config value, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// A switch set in the config file cannot be cleared from the command line.
pub fn switch(flag: bool, config: Option<bool>) -> bool {
    flag || config.unwrap_or(false)
}
