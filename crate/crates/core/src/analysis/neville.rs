//! Neville polynomial extrapolation with the full tableau and its
//! parent-daughter differences.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct NevilleTableau {
    /// Abscissae, farthest from `target` first.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub target: f64,
    /// `tableau[m][i]` is the degree-`m` value through points `i..=i+m`.
    pub tableau: Vec<Vec<f64>>,
    /// `d_diffs[m-1][i] = P_{i..i+m} − P_{i+1..i+m}` for `m >= 1`.
    pub d_diffs: Vec<Vec<f64>>,
    /// `c_diffs[m-1][i] = P_{i..i+m} − P_{i..i+m-1}` for `m >= 1`.
    pub c_diffs: Vec<Vec<f64>>,
    pub extrapolated: f64,
    pub stability_warning: Option<String>,
}

impl NevilleTableau {
    /// The daughter recursion applied to the stored parents of entry `(m, i)`.
    pub fn recompute(&self, m: usize, i: usize) -> f64 {
        let x = self.target;
        let (xi, xm) = (self.xs[i], self.xs[i + m]);
        ((x - xm) * self.tableau[m - 1][i] + (xi - x) * self.tableau[m - 1][i + 1]) / (xi - xm)
    }

    /// `D` values along the lower diagonal, from the nearest point up to the apex.
    pub fn lower_diagonal_d(&self) -> Vec<f64> {
        let n = self.xs.len();
        (1..n).map(|m| self.d_diffs[m - 1][n - 1 - m]).collect()
    }
}

/// Build the tableau for `points = (x, y)` and evaluate at `target`.
pub fn neville_extrapolate(points: &[(f64, f64)], target: f64) -> Result<NevilleTableau> {
    if points.is_empty() {
        return Err(Error::NotEnoughData { needed: 1, got: 0 });
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| (b.0 - target).abs().total_cmp(&(a.0 - target).abs()));
    for w in 0..pts.len() {
        for v in (w + 1)..pts.len() {
            if pts[w].0 == pts[v].0 {
                return Err(Error::DuplicateAbscissa(pts[w].0));
            }
        }
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let n = xs.len();

    let mut tableau = vec![ys.clone()];
    let mut d_diffs = Vec::new();
    let mut c_diffs = Vec::new();
    for m in 1..n {
        let prev = &tableau[m - 1];
        let row: Vec<f64> = (0..n - m)
            .map(|i| {
                let (xi, xm) = (xs[i], xs[i + m]);
                ((target - xm) * prev[i] + (xi - target) * prev[i + 1]) / (xi - xm)
            })
            .collect();
        d_diffs.push((0..n - m).map(|i| row[i] - prev[i + 1]).collect());
        c_diffs.push((0..n - m).map(|i| row[i] - prev[i]).collect());
        tableau.push(row);
    }
    let extrapolated = tableau[n - 1][0];

    let nearest = (xs[n - 1] - target).abs();
    let mut min_gap = f64::INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            min_gap = min_gap.min((xs[a] - xs[b]).abs());
        }
    }
    let stability_warning = (n > 1 && min_gap <= 2.0 * nearest).then(|| {
        format!("smallest spacing {min_gap:.4} is not larger than twice the extrapolation distance {nearest:.4}")
    });

    Ok(NevilleTableau {
        xs,
        ys,
        target,
        tableau,
        d_diffs,
        c_diffs,
        extrapolated,
        stability_warning,
    })
}
