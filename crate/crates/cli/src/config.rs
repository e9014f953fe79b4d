//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! pre_state = "coherent:1,2"          # short form, or a table
//! post_state = { kind = "hermite", k = 0 }
//! lambda_state = "coherent:1,0"
//! observable = "H"
//! p0 = 0.0
//! x_ref = 0.0
//! method = "lundeen"
//! output_dir = "out"
//!
//! [grid]
//! n_points = 256
//! extent = 20.0
//! hbar = 1.0
//! ```
//!
//! Every key is optional. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use weakwigner::{SpatialGrid, StateSpec};

use crate::CliError;

pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_EXTENT: f64 = 20.0;
pub const HBAR_ENV: &str = "WEAKWIGNER_HBAR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_points: Option<usize>,
    pub extent: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateField {
    Short(String),
    Full(StateSpec),
}

impl StateField {
    fn resolve(&self, base: &Path) -> Result<StateSpec, CliError> {
        let spec = match self {
            StateField::Short(s) => StateSpec::parse_short(s)?,
            StateField::Full(spec) => spec.clone(),
        };
        Ok(match spec {
            StateSpec::CustomCsv { path } if path.is_relative() => StateSpec::CustomCsv { path: base.join(path) },
            other => other,
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub grid: GridSection,
    pub pre_state: Option<StateField>,
    pub post_state: Option<StateField>,
    pub lambda_state: Option<StateField>,
    pub observable: Option<String>,
    pub p0: Option<f64>,
    pub x_ref: Option<f64>,
    pub method: Option<String>,
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn state(&self, flag: Option<&str>, field: &Option<StateField>, name: &str) -> Result<StateSpec, CliError> {
        if let Some(text) = flag {
            return Ok(StateSpec::parse_short(text)?);
        }
        field
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("no {name} given in flags or config")))?
            .resolve(&self.base_dir)
    }

    /// Flags win over the config file. ħ falls back to the environment and
    /// then to 1.
    pub fn grid(&self, grid_flag: Option<&str>, hbar_flag: Option<f64>) -> Result<SpatialGrid, CliError> {
        let (mut n, mut extent) =
            (self.grid.n_points.unwrap_or(DEFAULT_POINTS), self.grid.extent.unwrap_or(DEFAULT_EXTENT));
        if let Some(text) = grid_flag {
            (n, extent) = parse_grid_flag(text)?;
        }
        let hbar = match hbar_flag.or(self.grid.hbar) {
            Some(h) => h,
            None => hbar_from_env()?.unwrap_or(1.0),
        };
        Ok(SpatialGrid::new(n, extent, hbar).map_err(|e| CliError::Config(e.to_string()))?)
    }
}

pub fn hbar_from_env() -> Result<Option<f64>, CliError> {
    match std::env::var(HBAR_ENV) {
        Ok(v) => v.trim().parse::<f64>().map(Some).map_err(|e| CliError::Config(format!("{HBAR_ENV}={v}: {e}"))),
        Err(_) => Ok(None),
    }
}

pub fn parse_grid_flag(text: &str) -> Result<(usize, f64), CliError> {
    let bad = || CliError::Config(format!("--grid expects N,extent, got `{text}`"));
    let (n, e) = text.split_once(',').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?))
}
