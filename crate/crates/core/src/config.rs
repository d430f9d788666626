//! Run configuration read from TOML.
//!
//! Every section has defaults, so an empty file is a valid `evolve` run of the
//! reference refrigerator. The resolved configuration is written back into
//! every output file and parses to the same run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::cooling::OptimizationRanges;
use crate::analysis::fit::AsymptotePolicy;
use crate::analysis::search::SearchSettings;
use crate::analysis::sweep::SweepSettings;
use crate::engine::{uniform_grid, RefrigeratorParams, DEFAULT_PRUNE_TOL};
use crate::markov::{MarkovParams, MarkovRanges};
use crate::star::SingleStarParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {reason}")]
    Field { path: String, reason: String },
}

fn field(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        path: path.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Single,
    #[default]
    Evolve,
    Optimize,
    Scaling,
    Markov,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkovAction {
    #[default]
    Evolve,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            start: 0.0,
            stop: 10.0,
            step: 0.005,
        }
    }
}

impl TimeGrid {
    pub fn points(&self) -> crate::Result<Vec<f64>> {
        uniform_grid(self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizationConfig {
    pub budget: usize,
    pub seed: u64,
    pub local_starts: usize,
    pub sample_fraction: f64,
    pub ranges: OptimizationRanges,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        let s = SearchSettings::default();
        OptimizationConfig {
            budget: s.budget,
            seed: s.seed,
            local_starts: s.local_starts,
            sample_fraction: s.sample_fraction,
            ranges: OptimizationRanges::default(),
        }
    }
}

impl OptimizationConfig {
    pub fn search(&self) -> SearchSettings {
        SearchSettings {
            budget: self.budget,
            seed: self.seed,
            local_starts: self.local_starts,
            sample_fraction: self.sample_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub n_values: Vec<u32>,
    pub neville_n: Vec<u32>,
    pub asymptote: AsymptotePolicy,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        let s = SweepSettings::default();
        ScalingConfig {
            n_values: s.n_values,
            neville_n: s.neville_n,
            asymptote: s.asymptote,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Largest single-star bath checked (0 skips the single-star grid).
    pub max_single_n: u32,
    pub refrigerator_n: Vec<[u32; 3]>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            max_single_n: 6,
            refrigerator_n: vec![[1, 1, 1], [2, 1, 1]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkovConfig {
    pub action: MarkovAction,
    pub epsilon: [f64; 3],
    pub g: f64,
    pub alpha: [f64; 3],
    pub cutoff: f64,
    pub beta: [f64; 3],
    pub ranges: MarkovRanges,
}

impl Default for MarkovConfig {
    fn default() -> Self {
        let p = MarkovParams::reference([7.98e-6, 2.67e-5, 3.13e-5], 0.0999197);
        MarkovConfig {
            action: MarkovAction::Evolve,
            epsilon: p.epsilon,
            g: p.g,
            alpha: p.alpha,
            cutoff: p.cutoff,
            beta: p.beta,
            ranges: MarkovRanges::default(),
        }
    }
}

impl MarkovConfig {
    pub fn params(&self) -> MarkovParams {
        MarkovParams {
            epsilon: self.epsilon,
            g: self.g,
            alpha: self.alpha,
            cutoff: self.cutoff,
            beta: self.beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Destination file; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// CSV for time series and JSON for reports when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub prune_tol: f64,
    /// JSON written by an `optimize` run; its optimal parameters replace
    /// `[refrigerator]` in `evolve` mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params_from: Option<PathBuf>,
    pub refrigerator: RefrigeratorParams,
    pub single: SingleStarParams,
    pub markov: MarkovConfig,
    pub time_grid: TimeGrid,
    pub optimization: OptimizationConfig,
    pub scaling: ScalingConfig,
    pub validate: ValidateConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Evolve,
            prune_tol: DEFAULT_PRUNE_TOL,
            params_from: None,
            refrigerator: RefrigeratorParams::default(),
            single: SingleStarParams::default(),
            markov: MarkovConfig::default(),
            time_grid: TimeGrid::default(),
            optimization: OptimizationConfig::default(),
            scaling: ScalingConfig::default(),
            validate: ValidateConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Output format after applying the per-mode default.
    pub fn format(&self) -> Format {
        self.output.format.unwrap_or(if self.is_time_series() { Format::Csv } else { Format::Json })
    }

    pub fn is_time_series(&self) -> bool {
        match self.mode {
            Mode::Single | Mode::Evolve => true,
            Mode::Markov => self.markov.action == MarkovAction::Evolve,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("prune_tol", self.prune_tol, true)?;
        if self.prune_tol >= 1e-3 {
            return Err(field("prune_tol", "must be below 1e-3"));
        }
        let r = &self.refrigerator;
        triple("refrigerator.epsilon", &r.epsilon, false)?;
        triple("refrigerator.bath_energy", &r.bath_energy, false)?;
        triple("refrigerator.coupling", &r.coupling, true)?;
        triple("refrigerator.beta", &r.beta, false)?;
        finite("refrigerator.g", r.g)?;
        for (k, n) in r.n_bath.iter().enumerate() {
            if *n == 0 {
                return Err(field(format!("refrigerator.n_bath[{k}]"), "must be at least 1"));
            }
        }
        r.validate().map_err(|e| field("refrigerator", e.to_string()))?;

        let s = &self.single;
        finite("single.epsilon", s.epsilon)?;
        finite("single.bath_energy", s.bath_energy)?;
        finite("single.coupling", s.coupling)?;
        finite("single.beta", s.beta)?;
        s.validate().map_err(|e| field("single", e.to_string()))?;

        let m = &self.markov;
        triple("markov.epsilon", &m.epsilon, false)?;
        triple("markov.alpha", &m.alpha, true)?;
        triple("markov.beta", &m.beta, false)?;
        finite("markov.g", m.g)?;
        positive("markov.cutoff", m.cutoff, true)?;
        if self.mode == Mode::Markov && m.action == MarkovAction::Evolve {
            m.params().validate().map_err(|e| field("markov", e.to_string()))?;
        }
        for (k, b) in m.ranges.alpha.iter().enumerate() {
            range(&format!("markov.ranges.alpha[{k}]"), *b)?;
        }
        range("markov.ranges.g", m.ranges.g)?;
        range("markov.ranges.time", m.ranges.time)?;
        positive("markov.ranges.time_step", m.ranges.time_step, true)?;

        let t = &self.time_grid;
        finite("time_grid.start", t.start)?;
        finite("time_grid.stop", t.stop)?;
        positive("time_grid.step", t.step, true)?;
        if t.start < 0.0 {
            return Err(field("time_grid.start", "must be >= 0"));
        }
        if t.stop < t.start {
            return Err(field("time_grid.stop", "must not precede time_grid.start"));
        }

        let o = &self.optimization;
        if o.budget == 0 {
            return Err(field("optimization.budget", "must be positive"));
        }
        if o.local_starts == 0 {
            return Err(field("optimization.local_starts", "must be positive"));
        }
        if !(o.sample_fraction > 0.0 && o.sample_fraction < 1.0) {
            return Err(field("optimization.sample_fraction", "must lie in (0, 1)"));
        }
        for (k, b) in o.ranges.coupling.iter().enumerate() {
            range(&format!("optimization.ranges.coupling[{k}]"), *b)?;
        }
        range("optimization.ranges.g", o.ranges.g)?;
        range("optimization.ranges.time", o.ranges.time)?;
        positive("optimization.ranges.time_step", o.ranges.time_step, true)?;

        let sc = &self.scaling;
        if self.mode == Mode::Scaling && sc.n_values.is_empty() {
            return Err(field("scaling.n_values", "must not be empty"));
        }
        if let Some(k) = sc.n_values.iter().position(|&n| n == 0) {
            return Err(field(format!("scaling.n_values[{k}]"), "must be at least 1"));
        }
        match sc.asymptote {
            AsymptotePolicy::AverageFrom(x) => positive("scaling.asymptote.average_from", x, true)?,
            AsymptotePolicy::Fixed(x) => finite("scaling.asymptote.fixed", x)?,
        }

        if self.mode == Mode::Validate && self.validate.max_single_n == 0 && self.validate.refrigerator_n.is_empty() {
            return Err(field("validate", "nothing to validate"));
        }
        for (k, n) in self.validate.refrigerator_n.iter().enumerate() {
            if n.contains(&0) {
                return Err(field(format!("validate.refrigerator_n[{k}]"), "bath sizes must be at least 1"));
            }
        }

        if self.format() == Format::Csv && !self.is_time_series() {
            return Err(field("output.format", "csv is only available for time-series runs"));
        }
        Ok(())
    }
}

fn finite(path: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field(path, format!("must be finite, got {x}")))
    }
}

fn positive(path: &str, x: f64, strict: bool) -> Result<(), ConfigError> {
    finite(path, x)?;
    if (strict && x <= 0.0) || x < 0.0 {
        let bound = if strict { "> 0" } else { ">= 0" };
        return Err(field(path, format!("must be {bound}, got {x}")));
    }
    Ok(())
}

fn triple(path: &str, xs: &[f64; 3], allow_zero: bool) -> Result<(), ConfigError> {
    for (k, x) in xs.iter().enumerate() {
        positive(&format!("{path}[{k}]"), *x, !allow_zero)?;
    }
    Ok(())
}

fn range(path: &str, b: [f64; 2]) -> Result<(), ConfigError> {
    finite(&format!("{path}[0]"), b[0])?;
    finite(&format!("{path}[1]"), b[1])?;
    if b[1] < b[0] {
        return Err(field(path, format!("empty range [{}, {}]", b[0], b[1])));
    }
    Ok(())
}
