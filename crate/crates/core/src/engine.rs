//! Exact dynamics of the three-qubit refrigerator with spin-star baths.
//!
//! Each qubit-bath pair conserves `S^z_i + J^z_i`, so the joint space splits
//! into sectors `(m1, m2, m3)` of dimension at most 8. A sector basis state
//! is a triple of local pair states; local index 0 is "qubit ground" and 1 is
//! "qubit excited", ordered canonically with pair 1 as the most significant
//! bit. The six-body interaction couples the two states `(g, e, g)` and
//! `(e, g, e)` whenever both exist in the sector.
//!
//! Sector Hamiltonians are real symmetric; they are diagonalized once when an
//! [`Engine`] is built and reused for every time evaluation.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::spin::{local_temperature, HalfInt, LocalTemperature, ReducedQubitState};
use crate::star::{self, LocalStates, SingleStarParams};

/// Tolerance of the autonomous-refrigeration condition.
pub const AUTONOMY_TOL: f64 = 1e-12;

/// Default cumulative-weight tolerance for sector pruning.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Hamiltonian and thermal parameters of the refrigerator (energies in units of `K`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefrigeratorParams {
    pub epsilon: [f64; 3],
    pub bath_energy: [f64; 3],
    pub coupling: [f64; 3],
    pub g: f64,
    pub n_bath: [u32; 3],
    pub beta: [f64; 3],
}

impl Default for RefrigeratorParams {
    fn default() -> Self {
        RefrigeratorParams::reference(30, [0.5, 0.5, 0.5], 0.05)
    }
}

impl RefrigeratorParams {
    /// Energies and temperatures of the reference cooling setup:
    /// ε = (1, 2, 1), E = (2, 4, 2), T = (1, 1, 2), with `N` spins per bath.
    pub fn reference(n: u32, coupling: [f64; 3], g: f64) -> Self {
        RefrigeratorParams {
            epsilon: [1.0, 2.0, 1.0],
            bath_energy: [2.0, 4.0, 2.0],
            coupling,
            g,
            n_bath: [n; 3],
            beta: [1.0, 1.0, 0.5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            self.pair(i).validate()?;
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid("g", format!("must be finite and >= 0, got {}", self.g)));
        }
        Ok(())
    }

    /// `E2 - ε2 = E1 - ε1 + E3 - ε3`.
    pub fn is_autonomous(&self) -> bool {
        let d = |i: usize| self.bath_energy[i] - self.epsilon[i];
        (d(1) - d(0) - d(2)).abs() <= AUTONOMY_TOL
    }

    /// Qubit-bath pair `i` (0-based) as a single central-spin system.
    pub fn pair(&self, i: usize) -> SingleStarParams {
        SingleStarParams {
            epsilon: self.epsilon[i],
            bath_energy: self.bath_energy[i],
            coupling: self.coupling[i],
            n_bath: self.n_bath[i],
            beta: self.beta[i],
        }
    }

    pub fn initial_temperatures(&self) -> [f64; 3] {
        self.beta.map(|b| 1.0 / b)
    }

    /// True when only the couplings `A` and `g` differ, so sector labels and
    /// weights can be shared.
    pub fn same_thermal_structure(&self, other: &RefrigeratorParams) -> bool {
        self.epsilon == other.epsilon
            && self.bath_energy == other.bath_energy
            && self.n_bath == other.n_bath
            && self.beta == other.beta
    }
}

/// A sector `(m1, m2, m3)` together with its normalized Boltzmann weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleSectorLabel {
    pub m: [HalfInt; 3],
    pub local: [LocalStates; 3],
    /// Share of the initial state's trace carried by this sector (all sectors sum to 1).
    pub weight: f64,
}

impl TripleSectorLabel {
    pub fn local_dims(&self) -> [usize; 3] {
        self.local.map(LocalStates::dim)
    }

    pub fn dim(&self) -> usize {
        self.local_dims().iter().product()
    }
}

/// Sector labels retained after pruning.
#[derive(Debug, Clone)]
pub struct SectorSet {
    pub labels: Vec<TripleSectorLabel>,
    pub total_count: usize,
    /// Sum of the weights of the retained labels.
    pub retained_weight: f64,
    pub prune_tol: f64,
}

/// All `(N1+2)(N2+2)(N3+2)` sectors, dropping the lightest ones while their
/// cumulative weight stays below `prune_tol`. Retained labels come back in
/// ascending `(m1, m2, m3)` order.
pub fn enumerate_triple_sectors(p: &RefrigeratorParams, prune_tol: f64) -> Result<SectorSet> {
    p.validate()?;
    if !(0.0..1.0).contains(&prune_tol) {
        return Err(invalid("prune_tol", format!("must lie in [0, 1), got {prune_tol}")));
    }
    let per_pair: Vec<Vec<(star::StarSector, f64)>> =
        (0..3).map(|i| star::sector_weights(&p.pair(i))).collect();

    let mut labels = Vec::with_capacity(per_pair.iter().map(Vec::len).product());
    for (s1, w1) in &per_pair[0] {
        for (s2, w2) in &per_pair[1] {
            for (s3, w3) in &per_pair[2] {
                labels.push(TripleSectorLabel {
                    m: [s1.m, s2.m, s3.m],
                    local: [s1.states, s2.states, s3.states],
                    weight: w1 * w2 * w3,
                });
            }
        }
    }
    let total_count = labels.len();

    if prune_tol > 0.0 {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&a, &b| {
            labels[a]
                .weight
                .total_cmp(&labels[b].weight)
                .then_with(|| labels[a].m.cmp(&labels[b].m))
        });
        let mut dropped = vec![false; labels.len()];
        let mut cumulative = 0.0;
        for idx in order {
            let w = labels[idx].weight;
            if cumulative + w >= prune_tol {
                break;
            }
            cumulative += w;
            dropped[idx] = true;
        }
        let mut keep = dropped.iter().map(|d| !d);
        labels.retain(|_| keep.next().unwrap_or(true));
    }

    let retained_weight = labels.iter().map(|l| l.weight).sum();
    Ok(SectorSet {
        labels,
        total_count,
        retained_weight,
        prune_tol,
    })
}

/// A basis state of a sector: per pair, whether the qubit is in its ground state.
pub type BasisState = [bool; 3];

/// Interaction-coupled states `(g, e, g)` and `(e, g, e)`.
const INT_LOW: BasisState = [true, false, true];
const INT_HIGH: BasisState = [false, true, false];

/// Real symmetric eigendecomposition with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct RealSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

fn real_eig(h: &DMatrix<f64>) -> Result<RealSpectrum> {
    let n = h.nrows();
    let eig = h
        .clone()
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or(Error::EigenConvergence { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(RealSpectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]),
    })
}

/// One sector with its Hamiltonian, spectrum, and normalized initial populations.
#[derive(Debug, Clone)]
pub struct TripleSectorSystem {
    pub label: TripleSectorLabel,
    pub basis: Vec<BasisState>,
    pub hamiltonian: DMatrix<f64>,
    pub spectrum: RealSpectrum,
    pub initial_populations: Vec<f64>,
    /// Positions of the two interaction states, when both exist.
    pub interaction_pair: Option<(usize, usize)>,
}

fn sector_basis(label: &TripleSectorLabel) -> Vec<BasisState> {
    let mut basis = Vec::with_capacity(label.dim());
    for &b1 in label.local[0].ground_flags() {
        for &b2 in label.local[1].ground_flags() {
            for &b3 in label.local[2].ground_flags() {
                basis.push([b1, b2, b3]);
            }
        }
    }
    basis
}

fn pair_energy(pair: &SingleStarParams, m: HalfInt, ground: bool) -> f64 {
    let (b_minus, b_plus) = pair.diagonal_energies(m);
    if ground {
        b_minus
    } else {
        b_plus
    }
}

/// Sector Hamiltonian in the canonical basis, without diagonalizing it.
pub fn sector_hamiltonian_matrix(
    p: &RefrigeratorParams,
    label: &TripleSectorLabel,
) -> (Vec<BasisState>, DMatrix<f64>, Option<(usize, usize)>) {
    let basis = sector_basis(label);
    let pairs = [p.pair(0), p.pair(1), p.pair(2)];
    let n = basis.len();
    let mut h = DMatrix::zeros(n, n);
    for (k, state) in basis.iter().enumerate() {
        h[(k, k)] = (0..3).map(|i| pair_energy(&pairs[i], label.m[i], state[i])).sum();
    }
    for i in 0..3 {
        if label.local[i] != LocalStates::Both {
            continue;
        }
        let u = pairs[i].exchange_element(label.m[i]);
        for (a, sa) in basis.iter().enumerate() {
            for (b, sb) in basis.iter().enumerate().skip(a + 1) {
                let differs_only_in_i = (0..3).all(|j| (j == i) != (sa[j] == sb[j]));
                if differs_only_in_i {
                    h[(a, b)] += u;
                    h[(b, a)] += u;
                }
            }
        }
    }
    let low = basis.iter().position(|s| *s == INT_LOW);
    let high = basis.iter().position(|s| *s == INT_HIGH);
    let interaction_pair = low.zip(high);
    if let Some((a, b)) = interaction_pair {
        h[(a, b)] += p.g;
        h[(b, a)] += p.g;
    }
    (basis, h, interaction_pair)
}

pub fn build_sector_hamiltonian(p: &RefrigeratorParams, label: &TripleSectorLabel) -> Result<TripleSectorSystem> {
    let (basis, hamiltonian, interaction_pair) = sector_hamiltonian_matrix(p, label);
    let spectrum = real_eig(&hamiltonian)?;
    let initial_populations = initial_populations(p, label, &basis);
    Ok(TripleSectorSystem {
        label: *label,
        basis,
        hamiltonian,
        spectrum,
        initial_populations,
        interaction_pair,
    })
}

fn initial_populations(p: &RefrigeratorParams, label: &TripleSectorLabel, basis: &[BasisState]) -> Vec<f64> {
    let fractions: Vec<f64> = (0..3).map(|i| p.pair(i).initial_ground_fraction(label.m[i])).collect();
    basis
        .iter()
        .map(|state| {
            (0..3)
                .map(|i| if state[i] { fractions[i] } else { 1.0 - fractions[i] })
                .product()
        })
        .collect()
}

/// Normalized diagonal initial state of a sector (product of per-pair thermal weights).
pub fn initial_sector_state(p: &RefrigeratorParams, label: &TripleSectorLabel) -> ComplexMatrix {
    let basis = sector_basis(label);
    linalg::diagonal_matrix(&initial_populations(p, label, &basis))
}

impl TripleSectorSystem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hamiltonian_complex(&self) -> ComplexMatrix {
        linalg::from_real(&self.hamiltonian)
    }

    /// `C = V^T ρ0 V` in the eigenbasis (real because ρ0 is diagonal and V real).
    fn eigenbasis_initial_state(&self) -> DMatrix<f64> {
        let v = &self.spectrum.eigenvectors;
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| {
            (0..n)
                .map(|k| v[(k, a)] * self.initial_populations[k] * v[(k, b)])
                .sum()
        })
    }

    /// Full sector density matrix at time `t`.
    pub fn state_at(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let v = linalg::from_real(&self.spectrum.eigenvectors);
        let phases: Vec<Complex64> = self
            .spectrum
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t))
            .collect();
        let mut u = v.clone();
        for (j, ph) in phases.iter().enumerate() {
            u.column_mut(j).iter_mut().for_each(|z| *z *= ph);
        }
        let u = u * v.transpose();
        let rho0 = linalg::diagonal_matrix(&self.initial_populations);
        let _ = n;
        &u * rho0 * u.adjoint()
    }
}

/// Cosine expansion of diagonal observables over all sectors:
/// `<O_i>(t) = constant_i + Σ_terms amplitude_i cos(ω t)`.
#[derive(Debug, Clone)]
pub struct SpectralExpansion {
    pub constant: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `amplitudes[term * n_obs + obs]`.
    pub amplitudes: Vec<f64>,
    pub n_observables: usize,
}

/// Values and time derivatives of the expanded observables on a grid.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub values: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
}

const REANCHOR_EVERY: usize = 64;

impl SpectralExpansion {
    pub fn term_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn value_at(&self, obs: usize, t: f64) -> f64 {
        let n = self.n_observables;
        self.constant[obs]
            + self
                .frequencies
                .iter()
                .enumerate()
                .map(|(k, &w)| self.amplitudes[k * n + obs] * (w * t).cos())
                .sum::<f64>()
    }

    pub fn derivative_at(&self, obs: usize, t: f64) -> f64 {
        let n = self.n_observables;
        -self
            .frequencies
            .iter()
            .enumerate()
            .map(|(k, &w)| self.amplitudes[k * n + obs] * w * (w * t).sin())
            .sum::<f64>()
    }

    /// Evaluate every observable (and optionally its derivative) on `grid`.
    /// Uniform grids use a phase recurrence that is re-anchored exactly every
    /// few steps.
    pub fn evaluate(&self, grid: &[f64], with_derivatives: bool) -> ObservableSeries {
        let n_obs = self.n_observables;
        let len = grid.len();
        let uniform = is_uniform(grid);
        const CHUNK: usize = 512;
        let partials: Vec<(Vec<f64>, Vec<f64>)> = self
            .frequencies
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(chunk_idx, freqs)| {
                let mut vals = vec![0.0; n_obs * len];
                let mut ders = if with_derivatives { vec![0.0; n_obs * len] } else { Vec::new() };
                for (local, &w) in freqs.iter().enumerate() {
                    let term = chunk_idx * CHUNK + local;
                    let amps = &self.amplitudes[term * n_obs..(term + 1) * n_obs];
                    accumulate_term(grid, uniform, w, amps, &mut vals, &mut ders, with_derivatives);
                }
                (vals, ders)
            })
            .collect();

        let mut values = vec![vec![0.0; len]; n_obs];
        let mut derivatives = vec![vec![0.0; if with_derivatives { len } else { 0 }]; n_obs];
        for (o, row) in values.iter_mut().enumerate() {
            row.iter_mut().for_each(|x| *x = self.constant[o]);
        }
        for (vals, ders) in &partials {
            for o in 0..n_obs {
                for k in 0..len {
                    values[o][k] += vals[o * len + k];
                    if with_derivatives {
                        derivatives[o][k] += ders[o * len + k];
                    }
                }
            }
        }
        ObservableSeries { values, derivatives }
    }
}

fn is_uniform(grid: &[f64]) -> bool {
    if grid.len() < 3 {
        return false;
    }
    let dt = grid[1] - grid[0];
    let scale = grid.iter().fold(0.0f64, |a, &t| a.max(t.abs())).max(1.0);
    grid.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * scale)
}

fn accumulate_term(
    grid: &[f64],
    uniform: bool,
    w: f64,
    amps: &[f64],
    vals: &mut [f64],
    ders: &mut [f64],
    with_derivatives: bool,
) {
    let len = grid.len();
    let n_obs = amps.len();
    let mut emit = |k: usize, c: f64, s: f64| {
        for o in 0..n_obs {
            vals[o * len + k] += amps[o] * c;
            if with_derivatives {
                ders[o * len + k] -= amps[o] * w * s;
            }
        }
    };
    if !uniform {
        for (k, &t) in grid.iter().enumerate() {
            let (s, c) = (w * t).sin_cos();
            emit(k, c, s);
        }
        return;
    }
    let dt = grid[1] - grid[0];
    let (sd, cd) = (w * dt).sin_cos();
    let mut c = 0.0;
    let mut s = 0.0;
    for k in 0..len {
        if k % REANCHOR_EVERY == 0 {
            let (s0, c0) = (w * grid[k]).sin_cos();
            c = c0;
            s = s0;
        } else {
            let cn = c * cd - s * sd;
            let sn = s * cd + c * sd;
            c = cn;
            s = sn;
        }
        emit(k, c, s);
    }
}

/// Three-qubit refrigerator with all retained sectors diagonalized.
/// Immutable after construction; safe to query from several threads.
#[derive(Debug, Clone)]
pub struct Engine {
    params: RefrigeratorParams,
    sectors: Vec<TripleSectorSystem>,
    weights: Vec<f64>,
    sector_set: Arc<SectorSet>,
}

/// Sampled refrigerator trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub ground_population: [Vec<f64>; 3],
    pub temperature: [Vec<f64>; 3],
    pub qdot_system: [Vec<f64>; 3],
    pub qdot_bath: [Vec<f64>; 3],
}

/// Ground populations and temperatures of one qubit over a time grid.
#[derive(Debug, Clone)]
pub struct QubitSeries {
    pub qubit_index: usize,
    pub times: Vec<f64>,
    pub ground_population: Vec<f64>,
    pub temperature: Vec<LocalTemperature>,
}

impl QubitSeries {
    pub fn temperature_values(&self) -> Vec<f64> {
        self.temperature.iter().map(|t| t.value()).collect()
    }
}

pub fn check_time_grid(grid: &[f64]) -> Result<()> {
    if let Some(k) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotonicGrid(k + 1));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("time_grid", "non-finite time"));
    }
    Ok(())
}

fn qubit_index(i: usize) -> Result<usize> {
    if (1..=3).contains(&i) {
        Ok(i - 1)
    } else {
        Err(invalid("qubit_index", format!("must be 1, 2, or 3, got {i}")))
    }
}

impl Engine {
    pub fn new(params: RefrigeratorParams, prune_tol: f64) -> Result<Engine> {
        let set = enumerate_triple_sectors(&params, prune_tol)?;
        Engine::with_sector_set(params, Arc::new(set))
    }

    /// Build an engine for new couplings reusing a previously enumerated sector set.
    /// The set must come from parameters with the same thermal structure.
    pub fn with_sector_set(params: RefrigeratorParams, set: Arc<SectorSet>) -> Result<Engine> {
        params.validate()?;
        let sectors = set
            .labels
            .par_iter()
            .map(|label| build_sector_hamiltonian(&params, label))
            .collect::<Result<Vec<_>>>()?;
        let total = set.retained_weight;
        let weights = set.labels.iter().map(|l| l.weight / total).collect();
        Ok(Engine {
            params,
            sectors,
            weights,
            sector_set: set,
        })
    }

    pub fn params(&self) -> &RefrigeratorParams {
        &self.params
    }

    pub fn sectors(&self) -> &[TripleSectorSystem] {
        &self.sectors
    }

    /// Normalized weights, parallel to [`Engine::sectors`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sector_set(&self) -> &Arc<SectorSet> {
        &self.sector_set
    }

    /// Per-sector states at time `t`, in sector order.
    pub fn sector_states(&self, t: f64) -> Vec<ComplexMatrix> {
        self.sectors.par_iter().map(|s| s.state_at(t)).collect()
    }

    fn weighted_diagonal_sum(&self, t: f64, f: impl Fn(&TripleSectorSystem, usize) -> f64 + Sync) -> f64 {
        let per_sector: Vec<f64> = self
            .sectors
            .par_iter()
            .map(|s| {
                let rho = s.state_at(t);
                (0..s.dim()).map(|k| rho[(k, k)].re * f(s, k)).sum()
            })
            .collect();
        per_sector.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    /// Reduced state of qubit `i` (1-based) at time `t`.
    pub fn reduced_qubit_state(&self, i: usize, t: f64) -> Result<ReducedQubitState> {
        let q = qubit_index(i)?;
        let r = self.weighted_diagonal_sum(t, |s, k| if s.basis[k][q] { 1.0 } else { 0.0 });
        Ok(ReducedQubitState {
            qubit_index: i,
            ground_population: r,
            time: t,
        })
    }

    /// Diagonal of the reduced state of bath `i` (1-based), indexed by
    /// `m_B = -N_i/2, ..., N_i/2`.
    pub fn reduced_bath_populations(&self, i: usize, t: f64) -> Result<Vec<f64>> {
        let q = qubit_index(i)?;
        let n = self.params.n_bath[q] as i32;
        let mut pops = vec![0.0; n as usize + 1];
        let states = self.sector_states(t);
        for ((s, rho), w) in self.sectors.iter().zip(&states).zip(&self.weights) {
            let d = s.label.m[q].doubled();
            for (k, state) in s.basis.iter().enumerate() {
                // m_B = m + 1/2 when the qubit is in its ground state, m - 1/2 otherwise.
                let mb2 = if state[q] { d + 1 } else { d - 1 };
                let idx = (mb2 + n) / 2;
                pops[idx as usize] += w * rho[(k, k)].re;
            }
        }
        Ok(pops)
    }

    pub fn total_trace(&self, t: f64) -> f64 {
        self.weighted_diagonal_sum(t, |_, _| 1.0)
    }

    /// `<S^z_i + J^z_i>` evaluated from the evolved sector populations.
    pub fn total_spin_z(&self, i: usize, t: f64) -> Result<f64> {
        let q = qubit_index(i)?;
        Ok(self.weighted_diagonal_sum(t, |s, k| {
            let m = s.label.m[q].value();
            let (spin, bath) = if s.basis[k][q] { (-0.5, m + 0.5) } else { (0.5, m - 0.5) };
            spin + bath
        }))
    }

    /// `Tr[ρ(t) H]`.
    pub fn energy(&self, t: f64) -> f64 {
        let per_sector: Vec<f64> = self
            .sectors
            .par_iter()
            .map(|s| {
                let rho = s.state_at(t);
                let h = s.hamiltonian_complex();
                linalg::trace(&(rho * h)).re
            })
            .collect();
        per_sector.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    /// Cosine expansion of the three ground populations `r_1, r_2, r_3`.
    /// Terms whose weighted amplitude is below `cutoff` are dropped.
    pub fn population_expansion(&self, cutoff: f64) -> SpectralExpansion {
        self.population_expansion_for(&[0, 1, 2], cutoff)
    }

    /// Expansion restricted to the listed 0-based qubits.
    pub fn population_expansion_for(&self, qubits: &[usize], cutoff: f64) -> SpectralExpansion {
        let n_obs = qubits.len();
        let per_sector: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = self
            .sectors
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(s, &w)| {
                let n = s.dim();
                let v = &s.spectrum.eigenvectors;
                let lambda = &s.spectrum.eigenvalues;
                let c = s.eigenbasis_initial_state();
                let mut constant = vec![0.0; n_obs];
                let mut freqs = Vec::new();
                let mut amps = Vec::new();
                // M_ab = Σ_{k: qubit ground} V_ka V_kb.
                let m_of = |q: usize, a: usize, b: usize| -> f64 {
                    (0..n).filter(|&k| s.basis[k][q]).map(|k| v[(k, a)] * v[(k, b)]).sum()
                };
                for (o, &q) in qubits.iter().enumerate() {
                    constant[o] = w * (0..n).map(|a| m_of(q, a, a) * c[(a, a)]).sum::<f64>();
                }
                for a in 0..n {
                    for b in (a + 1)..n {
                        let row: Vec<f64> = qubits.iter().map(|&q| 2.0 * w * m_of(q, a, b) * c[(a, b)]).collect();
                        if row.iter().all(|x| x.abs() <= cutoff) {
                            continue;
                        }
                        freqs.push(lambda[a] - lambda[b]);
                        amps.extend(row);
                    }
                }
                (constant, freqs, amps)
            })
            .collect();

        let mut constant = vec![0.0; n_obs];
        let mut frequencies = Vec::new();
        let mut amplitudes = Vec::new();
        for (c, f, a) in per_sector {
            for o in 0..n_obs {
                constant[o] += c[o];
            }
            frequencies.extend(f);
            amplitudes.extend(a);
        }
        SpectralExpansion {
            constant,
            frequencies,
            amplitudes,
            n_observables: n_obs,
        }
    }

    /// Ground population and temperature of qubit `i` (1-based) over `grid`.
    pub fn temperature_series(&self, i: usize, grid: &[f64]) -> Result<QubitSeries> {
        let q = qubit_index(i)?;
        check_time_grid(grid)?;
        let series = self.population_expansion_for(&[q], 0.0).evaluate(grid, false);
        let r = series.values.into_iter().next().unwrap_or_default();
        let temperature = r
            .iter()
            .map(|&x| local_temperature(x, self.params.epsilon[q]))
            .collect::<Result<Vec<_>>>()?;
        Ok(QubitSeries {
            qubit_index: i,
            times: grid.to_vec(),
            ground_population: r,
            temperature,
        })
    }

    /// Populations, temperatures and heat currents of all three qubits.
    ///
    /// Because `S^z_i + J^z_i` is conserved sector by sector, the local heat
    /// currents follow from the population derivatives:
    /// `Q̇_S = -ε dr/dt` and `Q̇_B = E dr/dt`.
    pub fn refrigerator_series(&self, grid: &[f64]) -> Result<TimeSeries> {
        check_time_grid(grid)?;
        let series = self.population_expansion(0.0).evaluate(grid, true);
        let mut temperature: [Vec<f64>; 3] = Default::default();
        let mut qdot_system: [Vec<f64>; 3] = Default::default();
        let mut qdot_bath: [Vec<f64>; 3] = Default::default();
        for q in 0..3 {
            temperature[q] = series.values[q]
                .iter()
                .map(|&r| local_temperature(r, self.params.epsilon[q]).map(LocalTemperature::value))
                .collect::<Result<Vec<_>>>()?;
            qdot_system[q] = series.derivatives[q].iter().map(|d| -self.params.epsilon[q] * d).collect();
            qdot_bath[q] = series.derivatives[q].iter().map(|d| self.params.bath_energy[q] * d).collect();
        }
        let [r1, r2, r3] = <[Vec<f64>; 3]>::try_from(series.values).expect("three observables");
        Ok(TimeSeries {
            times: grid.to_vec(),
            ground_population: [r1, r2, r3],
            temperature,
            qdot_system,
            qdot_bath,
        })
    }
}

/// Convenience wrapper: reduced state of qubit `i` without keeping the engine.
pub fn reduced_qubit_state(p: &RefrigeratorParams, i: usize, t: f64, prune_tol: f64) -> Result<ReducedQubitState> {
    Engine::new(*p, prune_tol)?.reduced_qubit_state(i, t)
}

pub fn reduced_bath_populations(p: &RefrigeratorParams, i: usize, t: f64, prune_tol: f64) -> Result<Vec<f64>> {
    Engine::new(*p, prune_tol)?.reduced_bath_populations(i, t)
}

pub fn temperature_series(p: &RefrigeratorParams, i: usize, grid: &[f64], prune_tol: f64) -> Result<QubitSeries> {
    Engine::new(*p, prune_tol)?.temperature_series(i, grid)
}

/// Uniform grid `start, start + step, ...` up to and including `stop` (within rounding).
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(invalid("time_grid", format!("bad grid [{start}, {stop}] step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}
