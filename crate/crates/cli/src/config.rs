//! TOML run configuration. Unknown keys are rejected and every value is
//! re-validated against the library's constructors at load time.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use grand_amalgam::amalgam::Window;
use grand_amalgam::grid::{
    DEFAULT_MIN_EPS_FRACTION, DEFAULT_POINTS, DEFAULT_REFINEMENT_ROUNDS, DEFAULT_RELATIVE_TOLERANCE,
};
use grand_amalgam::{make_epsilon_grid, EpsilonGrid, GrandExponent, MeasureSpace, Normalization};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub eps_grid: GridConfig,
    pub space: SpaceConfig,
    pub exponents: ExponentConfig,
    pub window: WindowConfig,
    pub bupu: BupuConfig,
    pub witness: WitnessConfig,
    pub closure: ClosureConfig,
    pub seed: u64,
    /// Generated input pairs per check when no files are given.
    pub trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps_grid: GridConfig::default(),
            space: SpaceConfig::default(),
            exponents: ExponentConfig::default(),
            window: WindowConfig::default(),
            bupu: BupuConfig::default(),
            witness: WitnessConfig::default(),
            closure: ClosureConfig::default(),
            seed: 0,
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub points: usize,
    /// `min_eps = min_eps_fraction * (p - 1)`.
    pub min_eps_fraction: f64,
    pub refinement_rounds: usize,
    pub tolerance: f64,
    pub include_zero_limit: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            min_eps_fraction: DEFAULT_MIN_EPS_FRACTION,
            refinement_rounds: DEFAULT_REFINEMENT_ROUNDS,
            tolerance: DEFAULT_RELATIVE_TOLERANCE,
            include_zero_limit: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    /// Keep the points and weights of the input file.
    #[default]
    Interval,
    Cyclic,
    Counting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationConfig {
    #[default]
    Probability,
    Counting,
}

impl From<NormalizationConfig> for Normalization {
    fn from(n: NormalizationConfig) -> Self {
        match n {
            NormalizationConfig::Probability => Normalization::Probability,
            NormalizationConfig::Counting => Normalization::Counting,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceConfig {
    pub kind: SpaceKind,
    /// Number of atoms for generated inputs.
    pub atoms: usize,
    pub normalization: NormalizationConfig,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            kind: SpaceKind::Interval,
            atoms: 16,
            normalization: NormalizationConfig::Probability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentConfig {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    /// Separate theta for the global component. Experimental.
    pub theta_global: Option<f64>,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: 2.0,
            theta: 1.0,
            theta_global: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    /// `size` consecutive atoms from `start`.
    pub size: Option<usize>,
    pub start: usize,
    /// Explicit point identifiers; overrides `size`.
    pub members: Option<Vec<i64>>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            size: Some(4),
            start: 0,
            members: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BupuConfig {
    pub block_size: usize,
    pub allow_ragged: bool,
}

impl Default for BupuConfig {
    fn default() -> Self {
        Self {
            block_size: 4,
            allow_ragged: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessConfig {
    pub m: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { m: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClosureConfig {
    pub tolerance: f64,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self {
            tolerance: grand_amalgam::grand::DEFAULT_CLOSURE_TOLERANCE,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> CliResult<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        config.validate().map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    /// Builds everything the commands will need once, so bad values surface
    /// before any work starts.
    pub fn validate(&self) -> CliResult<()> {
        let (local, global) = self.exponents()?;
        self.grid(&local)?;
        self.grid(&global)?;
        if self.space.atoms == 0 {
            return Err(CliError::Input("space.atoms must be positive".into()));
        }
        if self.bupu.block_size == 0 {
            return Err(CliError::Input("bupu.block_size must be positive".into()));
        }
        if self.window.members.as_ref().is_some_and(Vec::is_empty) {
            return Err(CliError::Input("window.members is empty".into()));
        }
        if self.window.members.is_none() && self.window.size.unwrap_or(0) == 0 {
            return Err(CliError::Input("window needs size > 0 or members".into()));
        }
        if self.witness.m < 2 {
            return Err(CliError::Input("witness.m must be at least 2".into()));
        }
        if self.closure.tolerance.is_nan() || self.closure.tolerance <= 0.0 {
            return Err(CliError::Input("closure.tolerance must be positive".into()));
        }
        Ok(())
    }

    /// `(p, theta)` and `(q, theta_global or theta)`.
    pub fn exponents(&self) -> CliResult<(GrandExponent, GrandExponent)> {
        let e = &self.exponents;
        let local = GrandExponent::new(e.p, e.theta)?;
        let global = GrandExponent::new(e.q, e.theta_global.unwrap_or(e.theta))?;
        Ok((local, global))
    }

    pub fn grid(&self, exp: &GrandExponent) -> CliResult<EpsilonGrid> {
        let g = &self.eps_grid;
        let grid = make_epsilon_grid(
            exp,
            g.points,
            g.min_eps_fraction * exp.eps_upper(),
            g.refinement_rounds,
            g.tolerance,
        )?;
        Ok(grid.with_zero_limit(g.include_zero_limit))
    }

    pub fn window(&self, space: &Arc<MeasureSpace>) -> CliResult<Window> {
        Ok(match &self.window.members {
            Some(members) => Window::new(space.clone(), members)?,
            None => Window::contiguous(
                space.clone(),
                self.window.start,
                self.window.size.unwrap_or(0),
            )
            .map_err(|_| {
                CliError::Input(format!(
                    "window of {} atoms from {} does not fit {} atoms",
                    self.window.size.unwrap_or(0),
                    self.window.start,
                    space.len()
                ))
            })?,
        })
    }
}

/// Where the config came from, for error messages.
pub fn load_or_default(path: Option<&PathBuf>) -> CliResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}
