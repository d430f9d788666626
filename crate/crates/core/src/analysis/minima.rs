//! Locating minima of sampled time series.

use serde::Serialize;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize a unimodal function on `[a, b]`; returns `(x, f(x))`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // The bracket ends may beat the midpoint when the minimum sits on them.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap_or((x, fx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LocalMinimum {
    Found { time: f64, value: f64, index: usize },
    /// The series has no interior local minimum.
    NoLocalMinimum,
}

impl LocalMinimum {
    pub fn time(&self) -> Option<f64> {
        match self {
            LocalMinimum::Found { time, .. } => Some(*time),
            LocalMinimum::NoLocalMinimum => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LocalMinimum::Found { value, .. } => Some(*value),
            LocalMinimum::NoLocalMinimum => None,
        }
    }
}

/// First `k` with `v[k] < v[k-1]` and `v[k] <= v[k+1]`. When `refine` is
/// given, the minimum is polished by golden-section search on
/// `(t[k-1], t[k+1])`; otherwise by the vertex of the parabola through the
/// three samples.
pub fn first_local_min(times: &[f64], values: &[f64], refine: Option<&dyn Fn(f64) -> f64>) -> Result<LocalMinimum> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < 3 {
        return Err(Error::NotEnoughData {
            needed: 3,
            got: times.len(),
        });
    }
    let Some(k) = (1..values.len() - 1).find(|&k| values[k] < values[k - 1] && values[k] <= values[k + 1]) else {
        return Ok(LocalMinimum::NoLocalMinimum);
    };
    let (mut time, mut value) = (times[k], values[k]);
    if let Some(f) = refine {
        let (t, v) = golden_section(f, times[k - 1], times[k + 1], 1e-10);
        if v <= value {
            time = t;
            value = v;
        }
    } else if let Some((t, v)) = parabola_vertex(&times[k - 1..=k + 1], &values[k - 1..=k + 1]) {
        time = t;
        value = v.min(value);
    }
    Ok(LocalMinimum::Found { time, value, index: k })
}

fn parabola_vertex(t: &[f64], v: &[f64]) -> Option<(f64, f64)> {
    let (d1, d2) = (t[1] - t[0], t[2] - t[1]);
    let s1 = (v[1] - v[0]) / d1;
    let s2 = (v[2] - v[1]) / d2;
    let curvature = (s2 - s1) / (t[2] - t[0]);
    if !(curvature > 0.0) {
        return None;
    }
    let x = 0.5 * (t[0] + t[1]) - s1 / (2.0 * curvature);
    let x = x.clamp(t[0], t[2]);
    let value = v[1] + (x - t[1]) * (s1 + curvature * (x - t[0]));
    Some((x, value))
}

/// Index of the smallest value (first one on ties).
pub fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
}
