//! Optimal transient cooling of the cold qubit over the couplings `(A1, A2, A3, g)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::minima::{first_local_min, golden_section, LocalMinimum};
use super::search::{minimize_in_box, Bounds, SearchSettings};
use crate::engine::{check_time_grid, enumerate_triple_sectors, uniform_grid, Engine, RefrigeratorParams, SectorSet};
use crate::error::{invalid, Result};
use crate::spin::{local_temperature, LocalTemperature};

/// Amplitude cutoff of the population expansion inside the search loop.
pub const OBJECTIVE_CUTOFF: f64 = 1e-11;

/// Minimum evaluation budget accepted by [`optimize_t1`].
pub const MIN_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizationRanges {
    pub coupling: [[f64; 2]; 3],
    pub g: [f64; 2],
    pub time: [f64; 2],
    pub time_step: f64,
}

impl Default for OptimizationRanges {
    fn default() -> Self {
        OptimizationRanges {
            coupling: [[0.0, 1.0]; 3],
            g: [0.0, 0.1],
            time: [0.0, 10.0],
            time_step: 0.005,
        }
    }
}

impl OptimizationRanges {
    pub fn bounds(&self) -> Bounds {
        Bounds::new(
            vec![self.coupling[0][0], self.coupling[1][0], self.coupling[2][0], self.g[0]],
            vec![self.coupling[0][1], self.coupling[1][1], self.coupling[2][1], self.g[1]],
        )
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        if self.time[0] < 0.0 {
            return Err(invalid("time", "range must start at t >= 0"));
        }
        if self.time[0] == self.time[1] {
            return Ok(vec![self.time[0]]);
        }
        uniform_grid(self.time[0], self.time[1], self.time_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingPoint {
    pub time: f64,
    pub t1: f64,
    pub ground_population: f64,
}

/// Best cold-qubit temperature over a time window, as a function of the couplings.
/// Sector labels and weights are enumerated once and shared by every evaluation.
#[derive(Debug, Clone)]
pub struct CoolingObjective {
    base: RefrigeratorParams,
    set: Arc<SectorSet>,
    grid: Vec<f64>,
    cutoff: f64,
}

impl CoolingObjective {
    pub fn new(base: RefrigeratorParams, prune_tol: f64, grid: Vec<f64>) -> Result<Self> {
        Self::with_cutoff(base, prune_tol, grid, OBJECTIVE_CUTOFF)
    }

    pub fn with_cutoff(base: RefrigeratorParams, prune_tol: f64, grid: Vec<f64>, cutoff: f64) -> Result<Self> {
        if grid.is_empty() {
            return Err(invalid("time_grid", "empty"));
        }
        check_time_grid(&grid)?;
        let set = Arc::new(enumerate_triple_sectors(&base, prune_tol)?);
        Ok(CoolingObjective {
            base,
            set,
            grid,
            cutoff,
        })
    }

    /// `x = (A1, A2, A3, g)`.
    pub fn params_at(&self, x: &[f64]) -> RefrigeratorParams {
        RefrigeratorParams {
            coupling: [x[0], x[1], x[2]],
            g: x[3],
            ..self.base
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<CoolingPoint> {
        let engine = Engine::with_sector_set(self.params_at(x), self.set.clone())?;
        let expansion = engine.population_expansion_for(&[0], self.cutoff);
        let eps = self.base.epsilon[0];
        let (time, r) = if self.grid.len() == 1 {
            (self.grid[0], expansion.value_at(0, self.grid[0]))
        } else {
            let values = expansion.evaluate(&self.grid, false).values.remove(0);
            let k = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(k, _)| k)
                .unwrap_or(0);
            let lo = self.grid[k.saturating_sub(1)];
            let hi = self.grid[(k + 1).min(self.grid.len() - 1)];
            let (t, neg) = golden_section(|t| -expansion.value_at(0, t), lo, hi, 1e-10);
            if -neg >= values[k] {
                (t, -neg)
            } else {
                (self.grid[k], values[k])
            }
        };
        let t1 = match local_temperature(r, eps)? {
            LocalTemperature::Positive(t) => t,
            _ => f64::INFINITY,
        };
        Ok(CoolingPoint {
            time,
            t1,
            ground_population: r,
        })
    }

    /// Objective value for the search; failures map to `+inf`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x).map(|p| p.t1).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub params: RefrigeratorParams,
    pub best_time: f64,
    pub best_t1: f64,
    pub evaluations: usize,
    pub restarts: usize,
}

impl OptimizationResult {
    pub fn couplings(&self) -> [f64; 4] {
        let c = self.params.coupling;
        [c[0], c[1], c[2], self.params.g]
    }
}

/// Minimize the cold-qubit temperature over the coupling box and the time window.
pub fn optimize_t1(
    base: &RefrigeratorParams,
    ranges: &OptimizationRanges,
    settings: &SearchSettings,
    prune_tol: f64,
) -> Result<OptimizationResult> {
    if settings.budget < MIN_BUDGET {
        return Err(invalid("budget", format!("need at least {MIN_BUDGET} evaluations, got {}", settings.budget)));
    }
    let bounds = ranges.bounds();
    bounds.validate("couplings")?;
    if !(ranges.time[0] <= ranges.time[1]) {
        return Err(crate::error::Error::EmptyRange("time"));
    }
    let objective = CoolingObjective::new(*base, prune_tol, ranges.time_grid()?)?;
    let outcome = minimize_in_box(|x: &[f64]| objective.value(x), &bounds, settings)?;
    let point = objective.evaluate(&outcome.x)?;
    Ok(OptimizationResult {
        params: objective.params_at(&outcome.x),
        best_time: point.time,
        best_t1: point.t1,
        evaluations: outcome.evaluations,
        restarts: outcome.restarts,
    })
}

/// First local minimum in time of `T1` for fixed parameters, refined on the
/// exact population expansion.
pub fn first_cooling_minimum(params: &RefrigeratorParams, grid: &[f64], prune_tol: f64) -> Result<LocalMinimum> {
    let engine = Engine::new(*params, prune_tol)?;
    let series = engine.temperature_series(1, grid)?;
    let expansion = engine.population_expansion_for(&[0], 0.0);
    let eps = params.epsilon[0];
    let refine = |t: f64| {
        local_temperature(expansion.value_at(0, t), eps)
            .map(LocalTemperature::value)
            .unwrap_or(f64::INFINITY)
    };
    first_local_min(&series.times, &series.temperature_values(), Some(&refine))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: u32) -> RefrigeratorParams {
        RefrigeratorParams::reference(n, [0.0; 3], 0.0)
    }

    #[test]
    fn degenerate_ranges_return_the_point() {
        let ranges = OptimizationRanges {
            coupling: [[0.5, 0.5]; 3],
            g: [0.05, 0.05],
            time: [0.0, 10.0],
            time_step: 0.005,
        };
        let s = SearchSettings {
            budget: 100,
            ..SearchSettings::default()
        };
        let r = optimize_t1(&base(2), &ranges, &s, 1e-12).unwrap();
        assert_eq!(r.evaluations, 1);
        let obj = CoolingObjective::new(base(2), 1e-12, ranges.time_grid().unwrap()).unwrap();
        assert_eq!(obj.evaluate(&[0.5, 0.5, 0.5, 0.05]).unwrap().t1, r.best_t1);
    }

    #[test]
    fn small_budget_is_rejected() {
        let s = SearchSettings {
            budget: 50,
            ..SearchSettings::default()
        };
        assert!(optimize_t1(&base(2), &OptimizationRanges::default(), &s, 1e-12).is_err());
    }

    #[test]
    fn no_coupling_means_no_cooling() {
        let obj = CoolingObjective::new(base(3), 0.0, uniform_grid(0.0, 2.0, 0.01).unwrap()).unwrap();
        let p = obj.evaluate(&[0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((p.t1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn objective_matches_direct_scan() {
        let grid = uniform_grid(0.0, 10.0, 0.005).unwrap();
        let obj = CoolingObjective::with_cutoff(base(4), 0.0, grid.clone(), 0.0).unwrap();
        let x = [0.6, 0.3, 0.8, 0.08];
        let p = obj.evaluate(&x).unwrap();
        let e = Engine::new(obj.params_at(&x), 0.0).unwrap();
        let s = e.temperature_series(1, &grid).unwrap();
        let scan = s.temperature_values().into_iter().fold(f64::INFINITY, f64::min);
        assert!(p.t1 <= scan + 1e-12 && p.t1 > scan - 1e-4);
        let direct = e.reduced_qubit_state(1, p.time).unwrap().ground_population;
        assert!((direct - p.ground_population).abs() < 1e-12);
    }
}
