//! Optional TOML run configuration. Command-line flags override it.

use std::path::Path;

use anyhow::{Context, Result};
use cone_tutte::disk::{PoissonOptions, PolarGrid};
use cone_tutte::io::SvgOptions;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seed for every random choice the run makes.
    pub seed: Option<u64>,
    /// Boundary vertex mapped to polygon vertex 0.
    pub start: Option<usize>,
    /// Weight scheme: `uniform`, `random`, `random:SEED:LO:HI` or a path.
    pub weights: Option<String>,
    pub poisson: PoissonOptions,
    pub grid: Option<PolarGrid>,
    pub svg: SvgOptions,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
