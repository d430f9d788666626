//! Seeded, bound-constrained derivative-free minimization: quasi-random
//! sampling followed by Nelder-Mead refinement from the best samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRIMES: [u32; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lower.len(),
                got: self.upper.len(),
            });
        }
        if self.lower.len() > PRIMES.len() {
            return Err(Error::DimensionMismatch {
                expected: PRIMES.len(),
                got: self.lower.len(),
            });
        }
        let ok = self
            .lower
            .iter()
            .zip(&self.upper)
            .all(|(l, u)| l.is_finite() && u.is_finite() && l <= u);
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyRange(name))
        }
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    fn is_point(&self) -> bool {
        (0..self.dim()).all(|i| self.width(i) == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    /// Total objective evaluations allowed.
    pub budget: usize,
    pub seed: u64,
    /// Number of best samples refined by the simplex search.
    pub local_starts: usize,
    /// Share of the budget spent on quasi-random sampling.
    pub sample_fraction: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            budget: 2000,
            seed: 1,
            local_starts: 8,
            sample_fraction: 0.3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Simplex (re)starts performed.
    pub restarts: usize,
    /// Best value seen after each evaluation, in a fixed evaluation order.
    pub incumbent_history: Vec<f64>,
}

fn radical_inverse(base: u32, mut index: u64) -> f64 {
    let b = u64::from(base);
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while index > 0 {
        out += (index % b) as f64 * inv;
        index /= b;
        inv /= base as f64;
    }
    out
}

/// Halton points in the box, shifted by a seeded random offset modulo 1.
pub fn shifted_halton(bounds: &Bounds, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..bounds.dim()).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|k| {
            (0..bounds.dim())
                .map(|i| {
                    let u = (radical_inverse(PRIMES[i], k as u64 + 1) + shift[i]).fract();
                    bounds.lower[i] + u * bounds.width(i)
                })
                .collect()
        })
        .collect()
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

struct LocalRun {
    x: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
    restarts: usize,
}

/// Nelder-Mead with projection onto the box; restarts around the incumbent
/// whenever the simplex collapses, until `budget` evaluations are used.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, bounds: &Bounds, start: &[f64], start_value: f64, budget: usize) -> LocalRun {
    let free: Vec<usize> = (0..bounds.dim()).filter(|&i| bounds.width(i) > 0.0).collect();
    let d = free.len();
    let mut best_x = start.to_vec();
    let mut best_v = start_value;
    let mut trace = Vec::with_capacity(budget);
    let mut restarts = 0;
    let mut step_scale = 0.1;
    let mut used = 0;

    let eval = |x: &[f64], used: &mut usize, trace: &mut Vec<f64>| -> f64 {
        *used += 1;
        let v = sanitize(f(x));
        trace.push(v);
        v
    };

    while used + d + 1 <= budget && d > 0 {
        restarts += 1;
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_v)];
        for &i in &free {
            let mut x = best_x.clone();
            let h = step_scale * bounds.width(i);
            x[i] = if x[i] + h <= bounds.upper[i] { x[i] + h } else { x[i] - h };
            bounds.clamp(&mut x);
            let v = eval(&x, &mut used, &mut trace);
            simplex.push((x, v));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[d].1 - simplex[0].1;
            let size = free
                .iter()
                .map(|&i| {
                    let lo = simplex.iter().map(|s| s.0[i]).fold(f64::INFINITY, f64::min);
                    let hi = simplex.iter().map(|s| s.0[i]).fold(f64::NEG_INFINITY, f64::max);
                    (hi - lo) / bounds.width(i)
                })
                .fold(0.0, f64::max);
            if used + 2 > budget || size < 1e-9 || (spread.abs() < 1e-13 && size < 1e-4) {
                break;
            }
            let mut centroid = vec![0.0; bounds.dim()];
            for (x, _) in &simplex[..d] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / d as f64;
                }
            }
            let point = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[d].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                bounds.clamp(&mut x);
                x
            };
            let xr = point(1.0);
            let vr = eval(&xr, &mut used, &mut trace);
            if vr < simplex[0].1 {
                let xe = point(2.0);
                let ve = eval(&xe, &mut used, &mut trace);
                simplex[d] = if ve < vr { (xe, ve) } else { (xr, vr) };
            } else if vr < simplex[d - 1].1 {
                simplex[d] = (xr, vr);
            } else {
                let (xc, vc) = if vr < simplex[d].1 {
                    let x = point(0.5);
                    let v = eval(&x, &mut used, &mut trace);
                    (x, v)
                } else {
                    let x = point(-0.5);
                    let v = eval(&x, &mut used, &mut trace);
                    (x, v)
                };
                if vc < simplex[d].1.min(vr) {
                    simplex[d] = (xc, vc);
                } else {
                    if used + d > budget {
                        break;
                    }
                    let x0 = simplex[0].0.clone();
                    for s in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = x0.iter().zip(&s.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                        bounds.clamp(&mut x);
                        let v = eval(&x, &mut used, &mut trace);
                        *s = (x, v);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_v {
            best_x = simplex[0].0.clone();
            best_v = simplex[0].1;
        }
        step_scale = (step_scale * 0.5).max(1e-3);
    }
    LocalRun {
        x: best_x,
        value: best_v,
        trace,
        restarts,
    }
}

/// Minimize `f` over `bounds` with at most `settings.budget` evaluations.
/// Results depend only on the inputs and the seed, not on thread scheduling.
pub fn minimize_in_box<F>(f: F, bounds: &Bounds, settings: &SearchSettings) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate("bounds")?;
    if settings.budget == 0 {
        return Err(Error::NotEnoughData { needed: 1, got: 0 });
    }
    if bounds.is_point() {
        let v = sanitize(f(&bounds.lower));
        return Ok(SearchOutcome {
            x: bounds.lower.clone(),
            value: v,
            evaluations: 1,
            restarts: 0,
            incumbent_history: vec![v],
        });
    }

    let n_samples = ((settings.budget as f64 * settings.sample_fraction).round() as usize)
        .clamp(1, settings.budget);
    let samples = shifted_halton(bounds, n_samples, settings.seed);
    let values: Vec<f64> = samples.par_iter().map(|x| sanitize(f(x))).collect();

    let mut order: Vec<usize> = (0..n_samples).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let starts: Vec<usize> = order.into_iter().take(settings.local_starts.max(1)).collect();
    let remaining = settings.budget - n_samples;
    let per_start = remaining / starts.len();

    let runs: Vec<LocalRun> = starts
        .par_iter()
        .map(|&s| nelder_mead(&f, bounds, &samples[s], values[s], per_start))
        .collect();

    let mut incumbent = f64::INFINITY;
    let mut history = Vec::with_capacity(settings.budget);
    for v in values.iter().chain(runs.iter().flat_map(|r| r.trace.iter())) {
        incumbent = incumbent.min(*v);
        history.push(incumbent);
    }
    let mut best_x = samples[starts[0]].clone();
    let mut best_v = values[starts[0]];
    for r in &runs {
        if r.value < best_v {
            best_v = r.value;
            best_x = r.x.clone();
        }
    }
    Ok(SearchOutcome {
        x: best_x,
        value: best_v,
        evaluations: history.len(),
        restarts: runs.iter().map(|r| r.restarts).sum(),
        incumbent_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(budget: usize, seed: u64) -> SearchSettings {
        SearchSettings {
            budget,
            seed,
            ..SearchSettings::default()
        }
    }

    #[test]
    fn finds_interior_minimum() {
        let b = Bounds::new(vec![-2.0, -2.0, -2.0], vec![2.0, 2.0, 2.0]);
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2) + (x[2] - 1.1).powi(2);
        let out = minimize_in_box(f, &b, &settings(1500, 3)).unwrap();
        assert!(out.value < 1e-10);
        assert!(out.evaluations <= 1500);
    }

    #[test]
    fn respects_bounds() {
        let b = Bounds::new(vec![0.0, 0.0], vec![1.0, 0.5]);
        let f = |x: &[f64]| -(x[0] + x[1]);
        let out = minimize_in_box(f, &b, &settings(600, 1)).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-9 && (out.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_box_returns_point_value() {
        let b = Bounds::new(vec![0.5, 0.2], vec![0.5, 0.2]);
        let out = minimize_in_box(|x: &[f64]| x[0] + x[1], &b, &settings(100, 1)).unwrap();
        assert_eq!(out.evaluations, 1);
        assert!((out.value - 0.7).abs() < 1e-15);
    }

    #[test]
    fn empty_range_is_an_error() {
        let b = Bounds::new(vec![1.0], vec![0.0]);
        assert!(matches!(
            minimize_in_box(|x: &[f64]| x[0], &b, &settings(10, 1)),
            Err(Error::EmptyRange(_))
        ));
    }

    #[test]
    fn history_is_monotone_and_deterministic() {
        let b = Bounds::new(vec![-3.0; 2], vec![3.0; 2]);
        let f = |x: &[f64]| (3.0 * x[0]).sin() + (2.0 * x[1]).cos() + 0.1 * (x[0] * x[0] + x[1] * x[1]);
        let a = minimize_in_box(f, &b, &settings(400, 9)).unwrap();
        let c = minimize_in_box(f, &b, &settings(400, 9)).unwrap();
        assert!(a.incumbent_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.x, c.x);
        assert_eq!(a.incumbent_history, c.incumbent_history);
    }

    #[test]
    fn halton_covers_unit_box() {
        let b = Bounds::new(vec![0.0; 2], vec![1.0; 2]);
        let pts = shifted_halton(&b, 256, 4);
        assert!(pts.iter().all(|p| p.iter().all(|v| (0.0..1.0).contains(v))));
        let left = pts.iter().filter(|p| p[0] < 0.5).count();
        assert!((118..=138).contains(&left));
        assert!((radical_inverse(2, 3) - 0.75).abs() < 1e-15);
    }
}
