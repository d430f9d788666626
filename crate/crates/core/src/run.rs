//! Executes a [`RunConfig`] and renders the result as CSV or JSON.
//!
//! CSV files open with `#` comment lines holding the library version and the
//! resolved configuration; JSON reports carry the same under `version` and
//! `config`. [`config_from_output`] recovers the configuration from either.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::cooling::optimize_t1;
use crate::analysis::sweep::{scaling_sweep, SweepSettings};
use crate::config::{ConfigError, Format, MarkovAction, Mode, RunConfig};
use crate::engine::{Engine, TimeSeries};
use crate::error::Error;
use crate::markov::{markov_optimize, markov_series};
use crate::oracle::run_validation_cases;
use crate::spin::local_temperature;
use crate::star::{reduced_spin_state, single_heat_currents};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}

impl RunError {
    /// 1 for configuration problems, 2 for everything that fails while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) | RunError::Output(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub format: Format,
    pub text: String,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct JsonReport<'a, T: Serialize> {
    version: &'a str,
    mode: Mode,
    config: String,
    warnings: &'a [String],
    result: T,
}

/// Fill in `params_from`, so the provenance describes the run without the
/// referenced file.
pub fn resolve(config: &RunConfig) -> Result<RunConfig, RunError> {
    let mut out = config.clone();
    if let Some(path) = out.params_from.take() {
        if config.mode == Mode::Evolve {
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            out.refrigerator = params_from_report(&text).map_err(|reason| ConfigError::Field {
                path: "params_from".into(),
                reason,
            })?;
            out.validate()?;
        } else {
            out.params_from = Some(path);
        }
    }
    Ok(out)
}

fn params_from_report(text: &str) -> Result<crate::RefrigeratorParams, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let params = v
        .pointer("/result/params")
        .ok_or_else(|| "no result.params in the optimization report".to_string())?;
    serde_json::from_value(params.clone()).map_err(|e| e.to_string())
}

/// Run and render without touching the file system (except `params_from`).
pub fn execute(config: &RunConfig) -> Result<RunOutput, RunError> {
    config.validate()?;
    let config = resolve(config)?;
    let format = config.format();
    let mut warnings = Vec::new();
    let text = match config.mode {
        Mode::Single => {
            let p = config.single;
            let grid = config.time_grid.points()?;
            let mut rows = Vec::with_capacity(grid.len());
            for &t in &grid {
                let r = reduced_spin_state(&p, t)?.ground_population;
                let temp = local_temperature(r, p.epsilon)?.value();
                let (qs, qb) = single_heat_currents(&p, t)?;
                rows.push(vec![t, temp, r, qs, qb]);
            }
            match format {
                Format::Csv => csv_text(&config, &["t", "T1", "r1", "qdot_S1", "qdot_B1"], &rows)?,
                Format::Json => json_text(&config, &warnings, &SingleSeries::from_rows(&rows))?,
            }
        }
        Mode::Evolve => {
            let engine = Engine::new(config.refrigerator, config.prune_tol)?;
            let series = engine.refrigerator_series(&config.time_grid.points()?)?;
            series_output(&config, &warnings, &series)?
        }
        Mode::Optimize => {
            let result = optimize_t1(
                &config.refrigerator,
                &config.optimization.ranges,
                &config.optimization.search(),
                config.prune_tol,
            )?;
            json_text(&config, &warnings, &result)?
        }
        Mode::Scaling => {
            let settings = SweepSettings {
                n_values: config.scaling.n_values.clone(),
                search: config.optimization.search(),
                ranges: config.optimization.ranges,
                prune_tol: config.prune_tol,
                neville_n: config.scaling.neville_n.clone(),
                asymptote: config.scaling.asymptote,
            };
            let report = scaling_sweep(&config.refrigerator, &settings)?;
            for tab in [&report.t1_neville, &report.tl_neville].into_iter().flatten() {
                if let Some(w) = &tab.stability_warning {
                    warnings.push(format!("extrapolation: {w}"));
                }
            }
            json_text(&config, &warnings, &report)?
        }
        Mode::Markov => {
            let p = config.markov.params();
            match config.markov.action {
                MarkovAction::Evolve => {
                    if let Some(w) = p.weak_coupling_warning() {
                        warnings.push(w);
                    }
                    let series = markov_series(&p, &config.time_grid.points()?)?;
                    series_output(&config, &warnings, &series)?
                }
                MarkovAction::Optimize => {
                    let result = markov_optimize(&p, &config.markov.ranges, &config.optimization.search())?;
                    if let Some(w) = result.params.weak_coupling_warning() {
                        warnings.push(w);
                    }
                    json_text(&config, &warnings, &result)?
                }
            }
        }
        Mode::Validate => {
            let report = run_validation_cases(config.validate.max_single_n, &config.validate.refrigerator_n)?;
            json_text(&config, &warnings, &report)?
        }
    };
    Ok(RunOutput { format, text, warnings })
}

/// [`execute`], then write to `output.path` or standard output.
pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    let out = execute(config)?;
    match &config.output.path {
        Some(path) => std::fs::write(path, &out.text)?,
        None => std::io::stdout().lock().write_all(out.text.as_bytes())?,
    }
    Ok(out)
}

#[derive(Serialize)]
struct SingleSeries {
    times: Vec<f64>,
    temperature: Vec<f64>,
    ground_population: Vec<f64>,
    qdot_system: Vec<f64>,
    qdot_bath: Vec<f64>,
}

impl SingleSeries {
    fn from_rows(rows: &[Vec<f64>]) -> Self {
        let col = |k: usize| rows.iter().map(|r| r[k]).collect();
        SingleSeries {
            times: col(0),
            temperature: col(1),
            ground_population: col(2),
            qdot_system: col(3),
            qdot_bath: col(4),
        }
    }
}

pub const SERIES_COLUMNS: [&str; 13] = [
    "t", "T1", "T2", "T3", "r1", "r2", "r3", "qdot_S1", "qdot_S2", "qdot_S3", "qdot_B1", "qdot_B2", "qdot_B3",
];

fn series_output(config: &RunConfig, warnings: &[String], s: &TimeSeries) -> Result<String, RunError> {
    match config.format() {
        Format::Json => json_text(config, warnings, s),
        Format::Csv => {
            let rows: Vec<Vec<f64>> = (0..s.times.len())
                .map(|k| {
                    let mut row = vec![s.times[k]];
                    for block in [&s.temperature, &s.ground_population, &s.qdot_system, &s.qdot_bath] {
                        row.extend(block.iter().map(|c| c[k]));
                    }
                    row
                })
                .collect();
            csv_text(config, &SERIES_COLUMNS, &rows)
        }
    }
}

fn provenance(config: &RunConfig) -> String {
    let mut out = format!("# csqar {VERSION}\n");
    for line in config.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

fn csv_text(config: &RunConfig, header: &[&str], rows: &[Vec<f64>]) -> Result<String, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| RunError::Output(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| (x + 0.0).to_string())).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| RunError::Output(std::io::Error::other(e.to_string())))?;
    let mut text = provenance(config);
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

fn json_text<T: Serialize>(config: &RunConfig, warnings: &[String], result: &T) -> Result<String, RunError> {
    let report = JsonReport {
        version: VERSION,
        mode: config.mode,
        config: config.to_toml(),
        warnings,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| RunError::Output(e.into()))?;
    text.push('\n');
    Ok(text)
}

/// The configuration embedded in a CSV or JSON output.
pub fn config_from_output(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let toml_text = v
            .get("config")
            .and_then(|c| c.as_str())
            .ok_or_else(|| ConfigError::Parse("report has no config field".into()))?;
        return RunConfig::from_toml(toml_text);
    }
    let toml_text: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| format!("{}\n", l.strip_prefix("# ").unwrap_or(&l[1..])))
        .collect();
    RunConfig::from_toml(&toml_text)
}

/// Lowest `T1` in an evolve CSV, ignoring inverted or infinite values.
pub fn min_t1_in_csv(text: &str) -> Option<f64> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let col = rdr.headers().ok()?.iter().position(|h| h == "T1")?;
    rdr.records()
        .filter_map(|r| r.ok()?.get(col)?.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
}
