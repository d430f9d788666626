//! Optimal cooling as a function of bath size `N = N1 = N2 = N3`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cooling::{first_cooling_minimum, optimize_t1, OptimizationRanges, OptimizationResult};
use super::fit::{fit_power_law, AsymptotePolicy, FitResult};
use super::neville::{neville_extrapolate, NevilleTableau};
use super::search::SearchSettings;
use crate::engine::{RefrigeratorParams, DEFAULT_PRUNE_TOL};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub n_values: Vec<u32>,
    pub search: SearchSettings,
    pub ranges: OptimizationRanges,
    pub prune_tol: f64,
    /// Bath sizes whose `h = 1/N` points enter the extrapolation (when present).
    pub neville_n: Vec<u32>,
    pub asymptote: AsymptotePolicy,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            n_values: vec![2, 4, 7, 10, 14, 20, 30, 40, 50],
            search: SearchSettings::default(),
            ranges: OptimizationRanges::default(),
            prune_tol: DEFAULT_PRUNE_TOL,
            neville_n: vec![2, 4, 7, 14, 50],
            asymptote: AsymptotePolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub optimum: OptimizationResult,
    /// First local minimum in time of `T1` at the optimal couplings.
    pub first_min_time: Option<f64>,
    pub first_min_t1: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub t1_fit: Option<FitResult>,
    pub t1_fit_error: Option<String>,
    pub t1_neville: Option<NevilleTableau>,
    pub tl_neville: Option<NevilleTableau>,
    pub tl_fit: Option<FitResult>,
    pub tl_fit_error: Option<String>,
}

/// Optimize every bath size in `settings.n_values` and summarize.
/// `template` supplies the energies and temperatures; its `N` and couplings are ignored.
pub fn scaling_sweep(template: &RefrigeratorParams, settings: &SweepSettings) -> Result<ScalingReport> {
    if settings.n_values.is_empty() {
        return Err(invalid("n_values", "empty sweep"));
    }
    let grid = settings.ranges.time_grid()?;
    let rows = settings
        .n_values
        .par_iter()
        .map(|&n| {
            let base = RefrigeratorParams {
                n_bath: [n; 3],
                ..*template
            };
            let optimum = optimize_t1(&base, &settings.ranges, &settings.search, settings.prune_tol)?;
            let first = first_cooling_minimum(&optimum.params, &grid, settings.prune_tol)?;
            Ok(ScalingRow {
                n,
                optimum,
                first_min_time: first.time(),
                first_min_t1: first.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(rows, settings))
}

fn neville_on(rows: &[ScalingRow], chosen: &[u32], value: impl Fn(&ScalingRow) -> Option<f64>) -> Option<NevilleTableau> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| chosen.contains(&r.n))
        .filter_map(|r| value(r).map(|v| (1.0 / f64::from(r.n), v)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    neville_extrapolate(&pts, 0.0).ok()
}

/// Fits and extrapolations for an already computed table.
pub fn summarize(rows: Vec<ScalingRow>, settings: &SweepSettings) -> ScalingReport {
    let t1_points: Vec<(f64, f64)> = rows.iter().map(|r| (f64::from(r.n), r.optimum.best_t1)).collect();
    let (t1_fit, t1_fit_error) = split(fit_power_law(&t1_points, settings.asymptote));
    let t1_neville = neville_on(&rows, &settings.neville_n, |r| Some(r.optimum.best_t1));
    let tl_neville = neville_on(&rows, &settings.neville_n, |r| r.first_min_time);
    let (tl_fit, tl_fit_error) = match &tl_neville {
        Some(tab) => {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.first_min_time.map(|t| (f64::from(r.n), t)))
                .collect();
            split(fit_power_law(&pts, AsymptotePolicy::Fixed(tab.extrapolated)))
        }
        None => (None, Some("no extrapolated asymptote for t_l".to_string())),
    };
    ScalingReport {
        rows,
        t1_fit,
        t1_fit_error,
        t1_neville,
        tl_neville,
        tl_fit,
        tl_fit_error,
    }
}

fn split<T>(r: Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}
