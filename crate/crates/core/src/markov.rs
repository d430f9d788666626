//! Markovian reference refrigerator: three qubits with a global GKSL master
//! equation and Ohmic harmonic baths.
//!
//! Computational basis `|q1 q2 q3⟩` with index `4 q1 + 2 q2 + q3`. The jump
//! operators below are eigenoperators of the dressed Hamiltonian only when
//! `|1⟩` is the lower qubit level, so `H_S = Σ ε_i σ^z_i / 2` with
//! `σ^z|0⟩ = |0⟩`, and a qubit's ground population is its `q = 1` population.
//! The interaction `g (|101⟩⟨010| + h.c.)` couples the two degenerate states
//! `|101⟩` and `|010⟩`, whose symmetric and antisymmetric combinations
//! `|±⟩` sit at `±g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::minima::golden_section;
use crate::analysis::search::{minimize_in_box, Bounds, SearchSettings};
use crate::engine::{check_time_grid, uniform_grid, TimeSeries};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::spin::{local_temperature, LocalTemperature};

pub const DEFAULT_CUTOFF: f64 = 1e3;
pub const RTOL: f64 = 1e-9;
pub const ATOL: f64 = 1e-12;

const DIM: usize = 8;
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovParams {
    pub epsilon: [f64; 3],
    pub g: f64,
    pub alpha: [f64; 3],
    pub cutoff: f64,
    pub beta: [f64; 3],
}

impl MarkovParams {
    /// Qubit energies ε = (1, 2, 1), temperatures T = (1, 1, 2).
    pub fn reference(alpha: [f64; 3], g: f64) -> Self {
        MarkovParams {
            epsilon: [1.0, 2.0, 1.0],
            g,
            alpha,
            cutoff: DEFAULT_CUTOFF,
            beta: [1.0, 1.0, 0.5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.epsilon[1] - self.epsilon[0] - self.epsilon[2]).abs() > DEGENERACY_TOL {
            return Err(invalid("epsilon", "need ε2 = ε1 + ε3 for the dressed jump operators"));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid("g", format!("must be finite and >= 0, got {}", self.g)));
        }
        for i in 0..3 {
            if !(self.epsilon[i] - self.g > 0.0) {
                return Err(invalid(
                    "g",
                    format!("transition frequency ε{} - g = {} is not positive", i + 1, self.epsilon[i] - self.g),
                ));
            }
            if !(self.alpha[i] >= 0.0) || !self.alpha[i].is_finite() {
                return Err(invalid("alpha", format!("must be finite and >= 0, got {}", self.alpha[i])));
            }
            if !(self.beta[i] > 0.0) {
                return Err(invalid("beta", format!("must be > 0, got {}", self.beta[i])));
            }
        }
        if !(self.cutoff > 0.0) {
            return Err(invalid("cutoff", "must be > 0"));
        }
        let (gamma, scale) = self.weak_coupling_ratio();
        if self.g > 0.0 && gamma >= 0.1 * scale {
            return Err(invalid(
                "alpha",
                format!("largest rate {gamma:.3e} is not small against min(ε, g) = {scale:.3e}"),
            ));
        }
        Ok(())
    }

    /// `(largest rate, min(ε_i, g))`.
    fn weak_coupling_ratio(&self) -> (f64, f64) {
        let mut gamma = 0.0f64;
        for i in 0..3 {
            for w in [self.epsilon[i], self.epsilon[i] + self.g, self.epsilon[i] - self.g] {
                gamma = gamma.max(decay_rate(self.alpha[i], self.cutoff, self.beta[i], w));
            }
        }
        let scale = self.epsilon.iter().cloned().fold(f64::INFINITY, f64::min).min(self.g);
        (gamma, scale)
    }

    /// Set when the rates exceed 1% of `min(ε_i, g)`.
    pub fn weak_coupling_warning(&self) -> Option<String> {
        let (gamma, scale) = self.weak_coupling_ratio();
        (gamma > 0.01 * scale).then(|| format!("largest rate {gamma:.3e} exceeds 1% of min(ε, g) = {scale:.3e}"))
    }
}

/// `1 / (e^{βω} − 1)`.
pub fn bose_einstein(omega: f64, beta: f64) -> f64 {
    1.0 / (beta * omega).exp_m1()
}

pub fn spectral_density(alpha: f64, cutoff: f64, omega: f64) -> f64 {
    alpha * omega * (-omega / cutoff).exp()
}

/// Emission rate for `ω > 0`, absorption rate `J(|ω|) f(|ω|)` for `ω < 0`.
pub fn decay_rate(alpha: f64, cutoff: f64, beta: f64, omega: f64) -> f64 {
    let w = omega.abs();
    if w == 0.0 {
        return 0.0;
    }
    let j = spectral_density(alpha, cutoff, w);
    let f = bose_einstein(w, beta);
    if omega > 0.0 {
        j * (1.0 + f)
    } else {
        j * f
    }
}

#[derive(Debug, Clone)]
pub struct JumpChannel {
    /// 1-based qubit index.
    pub qubit_index: usize,
    pub frequency: f64,
    pub operator: ComplexMatrix,
    pub rate: f64,
}

fn basis(bits: &str) -> Vec<Complex64> {
    let idx = usize::from_str_radix(bits, 2).expect("three-bit label");
    let mut v = vec![Complex64::new(0.0, 0.0); DIM];
    v[idx] = Complex64::new(1.0, 0.0);
    v
}

fn plus() -> Vec<Complex64> {
    combine(&basis("101"), &basis("010"), 1.0)
}

fn minus() -> Vec<Complex64> {
    combine(&basis("101"), &basis("010"), -1.0)
}

fn combine(a: &[Complex64], b: &[Complex64], sign: f64) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    a.iter().zip(b).map(|(x, y)| (x + y * sign) * s).collect()
}

fn outer(ket: &[Complex64], bra: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(DIM, DIM, |r, c| ket[r] * bra[c].conj())
}

fn ob(ket: &str, bra: &str) -> ComplexMatrix {
    outer(&basis(ket), &basis(bra))
}

/// The nine positive-frequency operators, as `(qubit, shift in units of g, operator)`.
pub fn positive_frequency_operators() -> Vec<(usize, f64, ComplexMatrix)> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (p, m) = (plus(), minus());
    vec![
        (1, 0.0, ob("111", "011") + ob("100", "000")),
        (1, 1.0, (outer(&basis("110"), &p) + outer(&m, &basis("001"))) * s),
        (1, -1.0, (outer(&p, &basis("001")) - outer(&basis("110"), &m)) * s),
        (2, 0.0, ob("110", "100") + ob("011", "001")),
        (2, 1.0, (outer(&basis("111"), &p) - outer(&m, &basis("000"))) * s),
        (2, -1.0, (outer(&p, &basis("000")) + outer(&basis("111"), &m)) * s),
        (3, 0.0, ob("111", "110") + ob("001", "000")),
        (3, 1.0, (outer(&basis("011"), &p) + outer(&m, &basis("100"))) * s),
        (3, -1.0, (outer(&p, &basis("100")) - outer(&basis("011"), &m)) * s),
    ]
}

/// All eighteen channels: the operators above with their emission rates and
/// their adjoints with absorption rates.
pub fn build_jump_channels(p: &MarkovParams) -> Result<Vec<JumpChannel>> {
    p.validate()?;
    let mut out = Vec::with_capacity(18);
    for (q, shift, op) in positive_frequency_operators() {
        let i = q - 1;
        let w = p.epsilon[i] + shift * p.g;
        out.push(JumpChannel {
            qubit_index: q,
            frequency: w,
            rate: decay_rate(p.alpha[i], p.cutoff, p.beta[i], w),
            operator: op.clone(),
        });
        out.push(JumpChannel {
            qubit_index: q,
            frequency: -w,
            rate: decay_rate(p.alpha[i], p.cutoff, p.beta[i], -w),
            operator: op.adjoint(),
        });
    }
    Ok(out)
}

/// `σ^z_i` with `σ^z|0⟩ = |0⟩`, qubit 1 the most significant bit.
pub fn sigma_z(i: usize) -> ComplexMatrix {
    let shift = 2 - i;
    let d: Vec<f64> = (0..DIM).map(|k| if (k >> shift) & 1 == 0 { 1.0 } else { -1.0 }).collect();
    linalg::diagonal_matrix(&d)
}

pub fn sigma_x(i: usize) -> ComplexMatrix {
    let bit = 1 << (2 - i);
    ComplexMatrix::from_fn(DIM, DIM, |r, c| {
        if r ^ c == bit {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Σ ε_i σ^z_i / 2 + g (|101⟩⟨010| + |010⟩⟨101|)`.
pub fn system_hamiltonian(p: &MarkovParams) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(DIM, DIM);
    for i in 0..3 {
        h += sigma_z(i) * Complex64::new(p.epsilon[i] / 2.0, 0.0);
    }
    h + (ob("101", "010") + ob("010", "101")) * Complex64::new(p.g, 0.0)
}

/// Product of qubit thermal states at inverse temperatures `β_i`.
pub fn thermal_initial_state(p: &MarkovParams) -> ComplexMatrix {
    let d: Vec<f64> = (0..DIM)
        .map(|k| {
            (0..3)
                .map(|i| {
                    let upper = (k >> (2 - i)) & 1 == 0;
                    let e = if upper { p.epsilon[i] / 2.0 } else { -p.epsilon[i] / 2.0 };
                    (-p.beta[i] * e).exp() / (2.0 * (p.beta[i] * p.epsilon[i] / 2.0).cosh())
                })
                .product()
        })
        .collect();
    linalg::diagonal_matrix(&d)
}

/// Ground population (the `q_i = 1` level) of qubit `i` (1-based).
pub fn ground_population(rho: &ComplexMatrix, i: usize) -> f64 {
    let shift = 3 - i;
    (0..DIM).filter(|k| (k >> shift) & 1 == 1).map(|k| rho[(k, k)].re).sum()
}

/// Column-major vectorized generator `d vec(ρ)/dt = M vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: ComplexMatrix,
    /// Dissipative part contributed by each bath.
    pub dissipators: [ComplexMatrix; 3],
}

impl Liouvillian {
    pub fn new(p: &MarkovParams) -> Result<Self> {
        let channels = build_jump_channels(p)?;
        let h = system_hamiltonian(p);
        let id = ComplexMatrix::identity(DIM, DIM);
        let mi = Complex64::new(0.0, -1.0);
        let mut m = (id.kronecker(&h) - h.transpose().kronecker(&id)) * mi;
        let mut dissipators: [ComplexMatrix; 3] = std::array::from_fn(|_| ComplexMatrix::zeros(DIM * DIM, DIM * DIM));
        for ch in channels.iter().filter(|c| c.rate > 0.0) {
            let l = &ch.operator;
            let ldl = l.adjoint() * l;
            let r = Complex64::new(ch.rate, 0.0);
            let half = Complex64::new(0.5 * ch.rate, 0.0);
            let d = &mut dissipators[ch.qubit_index - 1];
            *d += l.conjugate().kronecker(l) * r;
            *d -= id.kronecker(&ldl) * half;
            *d -= ldl.transpose().kronecker(&id) * half;
        }
        for d in &dissipators {
            m += d;
        }
        Ok(Liouvillian { matrix: m, dissipators })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.matrix * vectorize(rho);
        unvectorize(v.as_slice())
    }

    /// `D_i(ρ)` for bath `i` (0-based).
    pub fn apply_dissipator(&self, i: usize, rho: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.dissipators[i] * vectorize(rho);
        unvectorize(v.as_slice())
    }
}

fn vectorize(rho: &ComplexMatrix) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(rho.as_slice())
}

fn unvectorize(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(DIM, DIM, v)
}

/// Dormand-Prince 5(4) on `y' = M y` with output at every grid time.
fn dopri_linear(m: &ComplexMatrix, y0: &[Complex64], grid: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let _ = C;
    let n = y0.len();
    let rhs = |y: &[Complex64]| -> Vec<Complex64> {
        let v = m * nalgebra::DVector::from_column_slice(y);
        v.as_slice().to_vec()
    };
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.to_vec();
    let mut t = grid[0];
    out.push(y.clone());
    let mut h = 0.01;
    let mut k1 = rhs(&y);
    for &target in &grid[1..] {
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            if step < 1e-13 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t });
            }
            let mut k = vec![k1.clone()];
            for s in 1..7 {
                let ys: Vec<Complex64> = (0..n)
                    .map(|j| y[j] + (0..s).map(|q| k[q][j] * (A[s][q] * step)).sum::<Complex64>())
                    .collect();
                k.push(rhs(&ys));
            }
            let y5: Vec<Complex64> = (0..n)
                .map(|j| y[j] + (0..7).map(|q| k[q][j] * (B5[q] * step)).sum::<Complex64>())
                .collect();
            let mut err = 0.0;
            for j in 0..n {
                let e: Complex64 = (0..7).map(|q| k[q][j] * ((B5[q] - B4[q]) * step)).sum();
                let sc = ATOL + RTOL * y[j].norm().max(y5[j].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y5;
                k1 = k.swap_remove(6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            if !last || err > 1.0 {
                h = proposed;
            }
            if h < 1e-13 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// States on `grid`, starting from `rho0` at `grid[0]`.
pub fn integrate_gksl(p: &MarkovParams, rho0: &ComplexMatrix, grid: &[f64]) -> Result<Vec<ComplexMatrix>> {
    if rho0.nrows() != DIM || rho0.ncols() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            got: rho0.nrows(),
        });
    }
    if grid.is_empty() {
        return Err(invalid("time_grid", "empty"));
    }
    check_time_grid(grid)?;
    let l = Liouvillian::new(p)?;
    integrate_with(&l, rho0, grid)
}

fn integrate_with(l: &Liouvillian, rho0: &ComplexMatrix, grid: &[f64]) -> Result<Vec<ComplexMatrix>> {
    let states = dopri_linear(&l.matrix, rho0.as_slice(), grid)?;
    Ok(states.iter().map(|v| unvectorize(v)).collect())
}

/// States on `grid` for an initial state given at `t = 0`.
fn integrate_from_zero(l: &Liouvillian, rho0: &ComplexMatrix, grid: &[f64]) -> Result<Vec<ComplexMatrix>> {
    if grid[0] == 0.0 {
        return integrate_with(l, rho0, grid);
    }
    let mut full = Vec::with_capacity(grid.len() + 1);
    full.push(0.0);
    full.extend_from_slice(grid);
    let mut states = integrate_with(l, rho0, &full)?;
    states.remove(0);
    Ok(states)
}

/// Populations, temperatures and heat currents on `grid`, starting from the
/// product thermal state. `Q̇_S` is the rate of change of `ε_i σ^z_i / 2` and
/// `Q̇_B` the energy flowing into bath `i`, `-Tr[H D_i(ρ)]`.
pub fn markov_series(p: &MarkovParams, grid: &[f64]) -> Result<TimeSeries> {
    let l = Liouvillian::new(p)?;
    if grid.is_empty() {
        return Err(invalid("time_grid", "empty"));
    }
    if grid[0] < 0.0 {
        return Err(invalid("time_grid", "times must be >= 0"));
    }
    check_time_grid(grid)?;
    let states = integrate_from_zero(&l, &thermal_initial_state(p), grid)?;
    let h = system_hamiltonian(p);
    let local: Vec<ComplexMatrix> = (0..3).map(|i| sigma_z(i) * Complex64::new(p.epsilon[i] / 2.0, 0.0)).collect();
    let mut out = TimeSeries {
        times: grid.to_vec(),
        ground_population: Default::default(),
        temperature: Default::default(),
        qdot_system: Default::default(),
        qdot_bath: Default::default(),
    };
    for rho in &states {
        let drho = l.apply(rho);
        for i in 0..3 {
            let r = ground_population(rho, i + 1);
            out.ground_population[i].push(r);
            out.temperature[i].push(local_temperature(r, p.epsilon[i]).map(LocalTemperature::value)?);
            out.qdot_system[i].push(linalg::trace(&(&local[i] * &drho)).re);
            out.qdot_bath[i].push(-linalg::trace(&(&h * l.apply_dissipator(i, rho))).re);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCooling {
    pub time: f64,
    pub t1: f64,
    pub ground_population: f64,
}

/// Lowest cold-qubit temperature over `grid`, refined between samples.
pub fn markov_min_t1(p: &MarkovParams, grid: &[f64]) -> Result<MarkovCooling> {
    let l = Liouvillian::new(p)?;
    if grid.is_empty() || grid[0] < 0.0 {
        return Err(invalid("time_grid", "need a non-empty grid starting at t >= 0"));
    }
    check_time_grid(grid)?;
    let states = integrate_from_zero(&l, &thermal_initial_state(p), grid)?;
    let r: Vec<f64> = states.iter().map(|s| ground_population(s, 1)).collect();
    let k = r
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let (mut time, mut best) = (grid[k], r[k]);
    if grid.len() > 2 {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(grid.len() - 1);
        let from = states[lo].clone();
        let t0 = grid[lo];
        let pop_at = |t: f64| -> f64 {
            if t <= t0 {
                return ground_population(&from, 1);
            }
            integrate_with(&l, &from, &[t0, t])
                .map(|s| ground_population(&s[1], 1))
                .unwrap_or(f64::NEG_INFINITY)
        };
        let (t, neg) = golden_section(|t| -pop_at(t), grid[lo], grid[hi], 1e-8);
        if -neg > best {
            time = t;
            best = -neg;
        }
    }
    let t1 = match local_temperature(best, p.epsilon[0])? {
        LocalTemperature::Positive(t) => t,
        _ => f64::INFINITY,
    };
    Ok(MarkovCooling {
        time,
        t1,
        ground_population: best,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkovRanges {
    pub alpha: [[f64; 2]; 3],
    pub g: [f64; 2],
    pub time: [f64; 2],
    pub time_step: f64,
}

impl Default for MarkovRanges {
    fn default() -> Self {
        MarkovRanges {
            alpha: [[0.0, 1e-4]; 3],
            g: [1e-3, 0.1],
            time: [0.0, 50.0],
            time_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovOptimum {
    pub params: MarkovParams,
    pub best_time: f64,
    pub best_t1: f64,
    pub evaluations: usize,
}

/// Minimize the cold-qubit temperature over `(α1, α2, α3, g)` and time.
/// `template` supplies ε, β and the cutoff.
pub fn markov_optimize(template: &MarkovParams, ranges: &MarkovRanges, settings: &SearchSettings) -> Result<MarkovOptimum> {
    let bounds = Bounds::new(
        vec![ranges.alpha[0][0], ranges.alpha[1][0], ranges.alpha[2][0], ranges.g[0]],
        vec![ranges.alpha[0][1], ranges.alpha[1][1], ranges.alpha[2][1], ranges.g[1]],
    );
    bounds.validate("markov ranges")?;
    if !(ranges.time[0] <= ranges.time[1]) || ranges.time[0] < 0.0 {
        return Err(Error::EmptyRange("time"));
    }
    let grid = if ranges.time[0] == ranges.time[1] {
        vec![ranges.time[0]]
    } else {
        uniform_grid(ranges.time[0], ranges.time[1], ranges.time_step)?
    };
    let at = |x: &[f64]| MarkovParams {
        alpha: [x[0], x[1], x[2]],
        g: x[3],
        ..*template
    };
    let objective = |x: &[f64]| markov_min_t1(&at(x), &grid).map(|c| c.t1).unwrap_or(f64::INFINITY);
    let outcome = minimize_in_box(objective, &bounds, settings)?;
    let params = at(&outcome.x);
    let best = markov_min_t1(&params, &grid)?;
    Ok(MarkovOptimum {
        params,
        best_time: best.time,
        best_t1: best.t1,
        evaluations: outcome.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        linalg::max_abs(&(a - b)) < tol
    }

    #[test]
    fn first_operator_maps_011_to_111() {
        let ops = positive_frequency_operators();
        let v = &ops[0].2 * nalgebra::DVector::from_vec(basis("011"));
        assert!((v[7] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v.iter().enumerate().all(|(k, z)| k == 7 || z.norm() < 1e-15));
    }

    #[test]
    fn rate_example() {
        let direct = (-0.001f64).exp() * (1.0 + 1.0 / (std::f64::consts::E - 1.0));
        assert!((decay_rate(1.0, 1000.0, 1.0, 1.0) - direct).abs() < 1e-14);
        assert!((direct - 1.580_40).abs() < 1e-5);
    }

    #[test]
    fn detailed_balance_and_zero_temperature() {
        for w in [0.5, 1.0, 2.1] {
            let up = decay_rate(0.3, 1000.0, 0.7, w);
            let down = decay_rate(0.3, 1000.0, 0.7, -w);
            assert!((down - (-0.7 * w).exp() * up).abs() < 1e-14);
            assert!(decay_rate(0.3, 1000.0, 800.0, -w) < 1e-150);
        }
    }

    #[test]
    fn operators_are_eigenoperators() {
        let p = MarkovParams::reference([0.0; 3], 0.07);
        let h = system_hamiltonian(&p);
        for ch in build_jump_channels(&p).unwrap() {
            let comm = &h * &ch.operator - &ch.operator * &h;
            let expected = &ch.operator * Complex64::new(-ch.frequency, 0.0);
            assert!(close(&comm, &expected, 1e-14), "qubit {} w {}", ch.qubit_index, ch.frequency);
        }
    }

    #[test]
    fn channels_rebuild_sigma_x() {
        let ops = positive_frequency_operators();
        for q in 1..=3 {
            let mut sum = ComplexMatrix::zeros(DIM, DIM);
            for (_, _, op) in ops.iter().filter(|o| o.0 == q) {
                sum += op + op.adjoint();
            }
            assert!(close(&sum, &sigma_x(q - 1), 1e-12));
        }
    }

    #[test]
    fn invalid_frequencies_are_rejected() {
        let mut p = MarkovParams::reference([1e-6; 3], 1.5);
        assert!(build_jump_channels(&p).is_err());
        p.g = 0.05;
        p.epsilon = [1.0, 2.5, 1.0];
        assert!(build_jump_channels(&p).is_err());
    }

    #[test]
    fn unitary_limit_preserves_energy_populations() {
        let p = MarkovParams::reference([0.0; 3], 0.08);
        let h = system_hamiltonian(&p);
        let spec = linalg::eig_hermitian(&h).unwrap();
        let rho0 = thermal_initial_state(&p);
        let grid = uniform_grid(0.0, 20.0, 1.0).unwrap();
        let states = integrate_gksl(&p, &rho0, &grid).unwrap();
        let pops = |rho: &ComplexMatrix| -> Vec<f64> {
            let v = &spec.eigenvectors;
            (0..DIM).map(|j| (v.column(j).adjoint() * rho * v.column(j))[(0, 0)].re).collect()
        };
        let p0 = pops(&rho0);
        for s in &states {
            for (a, b) in pops(s).iter().zip(&p0) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn exact_swap_oscillation() {
        let p = MarkovParams::reference([0.0; 3], 0.1);
        let rho0 = thermal_initial_state(&p);
        let t = 7.3;
        let s = integrate_gksl(&p, &rho0, &[0.0, t]).unwrap();
        let u = linalg::eig_hermitian(&system_hamiltonian(&p)).unwrap().propagator(t);
        let exact = &u * &rho0 * u.adjoint();
        assert!(close(&s[1], &exact, 1e-8));
    }

    #[test]
    fn single_bath_thermalizes_cold_qubit() {
        let p = MarkovParams {
            epsilon: [1.0, 2.0, 1.0],
            g: 0.0,
            alpha: [0.05, 0.0, 0.0],
            cutoff: DEFAULT_CUTOFF,
            beta: [0.4, 1.0, 0.5],
        };
        let mut rho0 = ComplexMatrix::zeros(DIM, DIM);
        rho0[(0, 0)] = Complex64::new(1.0, 0.0);
        let states = integrate_gksl(&p, &rho0, &[0.0, 200.0]).unwrap();
        let r = ground_population(&states[1], 1);
        let expected = (0.2f64).exp() / (2.0 * (0.2f64).cosh());
        assert!((r - expected).abs() < 1e-6);
        assert!((linalg::trace(&states[1]).re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn thermal_state_marginals() {
        let p = MarkovParams::reference([0.0; 3], 0.05);
        let rho = thermal_initial_state(&p);
        assert!((ground_population(&rho, 1) - 0.731_058_578_630_004_9).abs() < 1e-14);
        assert!((ground_population(&rho, 3) - 0.622_459_331_201_854_6).abs() < 1e-14);
        assert!((linalg::trace(&rho).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_energy_bookkeeping() {
        let p = MarkovParams::reference([1e-3, 1.5e-3, 1e-3], 0.09);
        let grid = uniform_grid(0.0, 6.0, 0.5).unwrap();
        let s = markov_series(&p, &grid).unwrap();
        let l = Liouvillian::new(&p).unwrap();
        let states = integrate_gksl(&p, &thermal_initial_state(&p), &grid).unwrap();
        let h = system_hamiltonian(&p);
        for (k, rho) in states.iter().enumerate() {
            let de = linalg::trace(&(&h * l.apply(rho))).re;
            let into_baths: f64 = (0..3).map(|i| s.qdot_bath[i][k]).sum();
            assert!((de + into_baths).abs() < 1e-13);
        }
        assert!((s.temperature[2][0] - 2.0).abs() < 1e-12);
    }
}
