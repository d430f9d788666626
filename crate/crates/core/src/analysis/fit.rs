//! Power-law fit `y(N) = t_inf + a N^(-b)` with a fixed asymptote.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Number of fitted parameters (`a` and `b`).
pub const FIT_PARAMS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptotePolicy {
    /// Average of the values at `N >= threshold`; those points then only
    /// enter the least-squares polish, not the logarithmic seed.
    AverageFrom(f64),
    Fixed(f64),
}

impl Default for AsymptotePolicy {
    fn default() -> Self {
        AsymptotePolicy::AverageFrom(35.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub t_inf: f64,
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    pub data_count: usize,
    pub param_count: usize,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        self.t_inf + self.a * n.powf(-self.b)
    }
}

/// `σ² = Σ (fit − data)² / (d − p)` with `p = 2`.
pub fn fit_sigma(points: &[(f64, f64)], t_inf: f64, a: f64, b: f64) -> f64 {
    let ss: f64 = points
        .iter()
        .map(|&(n, y)| {
            let r = t_inf + a * n.powf(-b) - y;
            r * r
        })
        .sum();
    (ss / (points.len() - FIT_PARAMS) as f64).sqrt()
}

fn sum_squares(points: &[(f64, f64)], t_inf: f64, a: f64, b: f64) -> f64 {
    points
        .iter()
        .map(|&(n, y)| (t_inf + a * n.powf(-b) - y).powi(2))
        .sum()
}

/// Ordinary least squares line `y = c0 + c1 x`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c1 = sxy / sxx;
    (my - c1 * mx, c1)
}

/// Levenberg-Marquardt on `(a, b)` with `t_inf` held fixed.
fn polish(points: &[(f64, f64)], t_inf: f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut lambda = 1e-3;
    let mut cost = sum_squares(points, t_inf, a, b);
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(n, y) in points {
            let p = n.powf(-b);
            let r = t_inf + a * p - y;
            let j = [p, -a * n.ln() * p];
            for u in 0..2 {
                jtr[u] += j[u] * r;
                for v in 0..2 {
                    jtj[u][v] += j[u] * j[v];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let m00 = jtj[0][0] * (1.0 + lambda);
            let m11 = jtj[1][1] * (1.0 + lambda);
            let m01 = jtj[0][1];
            let det = m00 * m11 - m01 * m01;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let da = -(m11 * jtr[0] - m01 * jtr[1]) / det;
            let db = -(m00 * jtr[1] - m01 * jtr[0]) / det;
            let trial = sum_squares(points, t_inf, a + da, b + db);
            if trial < cost {
                let rel = (cost - trial) / cost.max(f64::MIN_POSITIVE);
                a += da;
                b += db;
                cost = trial;
                lambda = (lambda * 0.3).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (a, b)
}

/// Fit `(N, value)` pairs. The asymptote comes from `policy`; `(a, b)` are
/// seeded by a straight-line fit of `ln(value − t_inf)` against `ln N` and
/// then refined by nonlinear least squares on all points.
pub fn fit_power_law(points: &[(f64, f64)], policy: AsymptotePolicy) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::NotEnoughData {
            needed: 4,
            got: points.len(),
        });
    }
    if points.iter().any(|&(n, y)| !(n > 0.0) || !y.is_finite()) {
        return Err(invalid("points", "need N > 0 and finite values"));
    }
    let (t_inf, seed_points): (f64, Vec<(f64, f64)>) = match policy {
        AsymptotePolicy::Fixed(t) => (t, points.to_vec()),
        AsymptotePolicy::AverageFrom(threshold) => {
            let tail: Vec<f64> = points.iter().filter(|p| p.0 >= threshold).map(|p| p.1).collect();
            if tail.is_empty() {
                return Err(invalid("t_inf", format!("no points with N >= {threshold} to average")));
            }
            let t = tail.iter().sum::<f64>() / tail.len() as f64;
            (t, points.iter().copied().filter(|p| p.0 < threshold).collect())
        }
    };
    if seed_points.len() < FIT_PARAMS {
        return Err(Error::NotEnoughData {
            needed: FIT_PARAMS,
            got: seed_points.len(),
        });
    }
    if let Some(&(n, value)) = seed_points.iter().find(|p| p.1 <= t_inf) {
        return Err(Error::NonPositiveResidual {
            n,
            value,
            asymptote: t_inf,
        });
    }
    let xs: Vec<f64> = seed_points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = seed_points.iter().map(|p| (p.1 - t_inf).ln()).collect();
    let (c0, c1) = line_fit(&xs, &ys);
    let (a, b) = polish(points, t_inf, c0.exp(), -c1);
    Ok(FitResult {
        t_inf,
        a,
        b,
        sigma: fit_sigma(points, t_inf, a, b),
        data_count: points.len(),
        param_count: FIT_PARAMS,
    })
}
