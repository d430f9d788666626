//! Heat currents through the qubits and their baths.
//!
//! Single-time currents are exact traces of `dρ/dt = -i[H, ρ]` against the
//! local energy operators of each sector. Time series use the cosine
//! expansion of the populations instead, which gives the same numbers (the
//! local energies are functions of the conserved `S^z + J^z`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Engine, TimeSeries, TripleSectorSystem};
use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatCurrentSample {
    pub time: f64,
    pub qdot_system: [f64; 3],
    pub qdot_bath: [f64; 3],
}

/// Every energy-flow channel of the total Hamiltonian at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatBreakdown {
    pub time: f64,
    pub qdot_system: [f64; 3],
    pub qdot_bath: [f64; 3],
    /// Flow into the qubit-bath exchange energy of each pair.
    pub qdot_coupling: [f64; 3],
    pub qdot_interaction: f64,
}

impl HeatBreakdown {
    pub fn sample(&self) -> HeatCurrentSample {
        HeatCurrentSample {
            time: self.time,
            qdot_system: self.qdot_system,
            qdot_bath: self.qdot_bath,
        }
    }

    /// `d<H>/dt` as the sum of all channels.
    pub fn total(&self) -> f64 {
        self.qdot_system.iter().sum::<f64>()
            + self.qdot_bath.iter().sum::<f64>()
            + self.qdot_coupling.iter().sum::<f64>()
            + self.qdot_interaction
    }

    /// `Q̇_S + Q̇_B + Q̇_SB` of pair `i` (0-based).
    pub fn pair_balance(&self, i: usize) -> f64 {
        self.qdot_system[i] + self.qdot_bath[i] + self.qdot_coupling[i]
    }
}

/// Sector-restricted pieces of the Hamiltonian.
struct ChannelOperators {
    system: [Vec<f64>; 3],
    bath: [Vec<f64>; 3],
    coupling: [DMatrix<f64>; 3],
    interaction: DMatrix<f64>,
}

fn channel_operators(engine: &Engine, sys: &TripleSectorSystem) -> ChannelOperators {
    let p = engine.params();
    let n = sys.dim();
    let mut system: [Vec<f64>; 3] = Default::default();
    let mut bath: [Vec<f64>; 3] = Default::default();
    let mut coupling: [DMatrix<f64>; 3] = Default::default();
    for i in 0..3 {
        let m = sys.label.m[i].value();
        system[i] = sys
            .basis
            .iter()
            .map(|s| p.epsilon[i] * if s[i] { -0.5 } else { 0.5 })
            .collect();
        bath[i] = sys
            .basis
            .iter()
            .map(|s| p.bath_energy[i] * if s[i] { m + 0.5 } else { m - 0.5 })
            .collect();
        let u = p.pair(i).exchange_element(sys.label.m[i]);
        coupling[i] = DMatrix::from_fn(n, n, |a, b| {
            let (sa, sb) = (sys.basis[a], sys.basis[b]);
            let only_i = (0..3).all(|j| (j == i) != (sa[j] == sb[j]));
            if only_i {
                u
            } else {
                0.0
            }
        });
    }
    let mut interaction = DMatrix::zeros(n, n);
    if let Some((a, b)) = sys.interaction_pair {
        interaction[(a, b)] = p.g;
        interaction[(b, a)] = p.g;
    }
    ChannelOperators {
        system,
        bath,
        coupling,
        interaction,
    }
}

fn trace_diag(k: &ComplexMatrix, d: &[f64]) -> f64 {
    d.iter().enumerate().map(|(i, x)| k[(i, i)].re * x).sum()
}

fn trace_real(k: &ComplexMatrix, o: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for a in 0..o.nrows() {
        for b in 0..o.ncols() {
            if o[(b, a)] != 0.0 {
                acc += (k[(a, b)] * o[(b, a)]).re;
            }
        }
    }
    acc
}

/// All energy-flow channels at time `t`.
pub fn heat_breakdown(engine: &Engine, t: f64) -> Result<HeatBreakdown> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    let per_sector: Vec<[f64; 10]> = engine
        .sectors()
        .par_iter()
        .map(|sys| {
            let rho = sys.state_at(t);
            let h = sys.hamiltonian_complex();
            let k = (&h * &rho - &rho * &h) * Complex64::new(0.0, -1.0);
            let ops = channel_operators(engine, sys);
            let mut out = [0.0; 10];
            for i in 0..3 {
                out[i] = trace_diag(&k, &ops.system[i]);
                out[3 + i] = trace_diag(&k, &ops.bath[i]);
                out[6 + i] = trace_real(&k, &ops.coupling[i]);
            }
            out[9] = trace_real(&k, &ops.interaction);
            out
        })
        .collect();
    let mut acc = [0.0; 10];
    for (vals, w) in per_sector.iter().zip(engine.weights()) {
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += w * v;
        }
    }
    Ok(HeatBreakdown {
        time: t,
        qdot_system: [acc[0], acc[1], acc[2]],
        qdot_bath: [acc[3], acc[4], acc[5]],
        qdot_coupling: [acc[6], acc[7], acc[8]],
        qdot_interaction: acc[9],
    })
}

pub fn heat_currents(engine: &Engine, t: f64) -> Result<HeatCurrentSample> {
    Ok(heat_breakdown(engine, t)?.sample())
}

/// `d<H>/dt` summed over all channels; zero up to rounding.
pub fn energy_balance(engine: &Engine, t: f64) -> Result<f64> {
    Ok(heat_breakdown(engine, t)?.total())
}

/// Heat currents on a whole grid.
pub fn heat_current_series(engine: &Engine, grid: &[f64]) -> Result<Vec<HeatCurrentSample>> {
    let s = engine.refrigerator_series(grid)?;
    Ok(samples_from_series(&s))
}

pub fn samples_from_series(s: &TimeSeries) -> Vec<HeatCurrentSample> {
    (0..s.times.len())
        .map(|k| HeatCurrentSample {
            time: s.times[k],
            qdot_system: [0, 1, 2].map(|i| s.qdot_system[i][k]),
            qdot_bath: [0, 1, 2].map(|i| s.qdot_bath[i][k]),
        })
        .collect()
}

/// Central differences in the interior, one-sided at the ends.
pub fn central_difference(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| {
            let (a, b) = match k {
                0 => (0, 1),
                k if k == n - 1 => (n - 2, n - 1),
                k => (k - 1, k + 1),
            };
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

/// Sign diagnostics for the cold qubit over a sampled trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    /// Samples with `dT1/dt < 0`.
    pub cooling_samples: usize,
    /// Share of cooling samples with `Q̇_S1 < 0` and `Q̇_B1 > 0`.
    pub cooling_sign_fraction: f64,
    /// Share of all samples where `Q̇_S1` and `dT1/dt` have the same sign
    /// (the qubit sheds energy exactly while it cools).
    pub sign_correlation: f64,
    /// Maximal intervals on which all three bath currents are positive.
    pub all_baths_positive: Vec<(f64, f64)>,
}

pub fn sign_report(s: &TimeSeries) -> SignReport {
    let dtdt = central_difference(&s.times, &s.temperature[0]);
    let n = s.times.len();
    let mut cooling = 0;
    let mut good = 0;
    let mut matched = 0;
    let mut counted = 0;
    for k in 0..n {
        let qs = s.qdot_system[0][k];
        let qb = s.qdot_bath[0][k];
        if dtdt[k] < 0.0 {
            cooling += 1;
            if qs < 0.0 && qb > 0.0 {
                good += 1;
            }
        }
        if dtdt[k] != 0.0 && qs != 0.0 {
            counted += 1;
            if qs.signum() == dtdt[k].signum() {
                matched += 1;
            }
        }
    }
    let mut intervals = Vec::new();
    let mut start: Option<usize> = None;
    for k in 0..=n {
        let positive = k < n && (0..3).all(|i| s.qdot_bath[i][k] > 0.0);
        match (positive, start) {
            (true, None) => start = Some(k),
            (false, Some(a)) => {
                intervals.push((s.times[a], s.times[k - 1]));
                start = None;
            }
            _ => {}
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    SignReport {
        cooling_samples: cooling,
        cooling_sign_fraction: ratio(good, cooling),
        sign_correlation: ratio(matched, counted),
        all_baths_positive: intervals,
    }
}

/// `Tr[ρ H]` change between two times; only for diagnostics.
pub fn energy_change(engine: &Engine, t0: f64, t1: f64) -> f64 {
    engine.energy(t1) - engine.energy(t0)
}
