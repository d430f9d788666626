//! Brute-force reference dynamics on the full symmetric Dicke space.
//!
//! Each qubit-bath pair is a `2 x (N+1)` tensor factor ordered `(s, m_B)`,
//! with `s = -1/2` first and `m_B` ascending from `-N/2`. Hamiltonians are
//! assembled from collective ladder operators, propagated with a
//! scaling-and-squaring Taylor exponential, and reduced by explicit partial
//! traces. None of this shares code with the sector engine beyond the
//! parameter types.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::engine::{Engine, RefrigeratorParams};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::star::{self, SingleStarParams};

pub const DIMENSION_CAP: usize = 1000;

/// A dense Hamiltonian with its thermal initial state on a tensor-product space.
#[derive(Debug, Clone)]
pub struct DenseModel {
    /// Local dimensions `[2, N1+1, 2, N2+1, ...]`.
    pub factors: Vec<usize>,
    pub hamiltonian: ComplexMatrix,
    pub initial_state: ComplexMatrix,
}

/// `J^z` and `J^+` on the spin-`N/2` ladder.
pub fn collective_spin(n: u32) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = n as usize + 1;
    let j = f64::from(n) / 2.0;
    let m = |k: usize| -j + k as f64;
    let jz = DMatrix::from_fn(d, d, |r, c| if r == c { m(r) } else { 0.0 });
    let jp = DMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            (j * (j + 1.0) - m(c) * (m(c) + 1.0)).sqrt()
        } else {
            0.0
        }
    });
    (jz, jp)
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

fn sigma_z_half() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, 0.5])
}

/// `S^+`: maps `s = -1/2` to `s = +1/2`.
fn sigma_plus() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

/// Qubit-bath pair Hamiltonian `ε S^z + E J^z + A (S^+ J^- + S^- J^+)`.
fn pair_hamiltonian(p: &SingleStarParams) -> DMatrix<f64> {
    let (jz, jp) = collective_spin(p.n_bath);
    let d = jz.nrows();
    let id_b = DMatrix::identity(d, d);
    let id_s = DMatrix::identity(2, 2);
    let sp = sigma_plus();
    let exchange = kron(&sp, &jp.transpose()) + kron(&sp.transpose(), &jp);
    kron(&sigma_z_half(), &id_b) * p.epsilon + kron(&id_s, &jz) * p.bath_energy + exchange * p.coupling
}

/// Unnormalized `exp(-β(ε S^z + E J^z))`, which is diagonal.
fn pair_thermal_diagonal(p: &SingleStarParams) -> Vec<f64> {
    let d = p.n_bath as usize + 1;
    let j = f64::from(p.n_bath) / 2.0;
    let mut out = Vec::with_capacity(2 * d);
    for s in [-0.5, 0.5] {
        for k in 0..d {
            let mb = -j + k as f64;
            out.push(-p.beta * (p.epsilon * s + p.bath_energy * mb));
        }
    }
    out
}

fn normalized_exp(logs: &[f64]) -> Vec<f64> {
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - hi).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

fn check_cap(required: usize) -> Result<()> {
    if required > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            required,
            cap: DIMENSION_CAP,
        });
    }
    Ok(())
}

pub fn build_dense_single(p: &SingleStarParams) -> Result<DenseModel> {
    p.validate()?;
    let d = p.n_bath as usize + 1;
    check_cap(2 * d)?;
    Ok(DenseModel {
        factors: vec![2, d],
        hamiltonian: linalg::from_real(&pair_hamiltonian(p)),
        initial_state: linalg::diagonal_matrix(&normalized_exp(&pair_thermal_diagonal(p))),
    })
}

/// `X = Σ |−½, m_B+1⟩⟨+½, m_B|` for `m_B = -N/2 .. N/2-1`, unit amplitudes.
fn interaction_shift(n: u32) -> DMatrix<f64> {
    let d = n as usize + 1;
    let mut x = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d - 1 {
        x[(k + 1, d + k)] = 1.0;
    }
    x
}

pub fn build_dense_refrigerator(p: &RefrigeratorParams) -> Result<DenseModel> {
    p.validate()?;
    let dims: Vec<usize> = p.n_bath.iter().map(|&n| 2 * (n as usize + 1)).collect();
    check_cap(dims.iter().product())?;
    let pairs: Vec<SingleStarParams> = (0..3).map(|i| p.pair(i)).collect();
    let ids: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::identity(d, d)).collect();

    let mut h = kron(&kron(&pair_hamiltonian(&pairs[0]), &ids[1]), &ids[2])
        + kron(&kron(&ids[0], &pair_hamiltonian(&pairs[1])), &ids[2])
        + kron(&kron(&ids[0], &ids[1]), &pair_hamiltonian(&pairs[2]));
    let x: Vec<DMatrix<f64>> = p.n_bath.iter().map(|&n| interaction_shift(n)).collect();
    let forward = kron(&kron(&x[0], &x[1].transpose()), &x[2]);
    h += (&forward + forward.transpose()) * p.g;

    let local: Vec<Vec<f64>> = pairs.iter().map(|q| normalized_exp(&pair_thermal_diagonal(q))).collect();
    let mut diag = Vec::with_capacity(dims.iter().product());
    for a in &local[0] {
        for b in &local[1] {
            for c in &local[2] {
                diag.push(a * b * c);
            }
        }
    }
    let mut factors = Vec::new();
    for &n in &p.n_bath {
        factors.push(2);
        factors.push(n as usize + 1);
    }
    Ok(DenseModel {
        factors,
        hamiltonian: linalg::from_real(&h),
        initial_state: linalg::diagonal_matrix(&diag),
    })
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(-i H t)` by Taylor series on a scaled argument followed by repeated squaring.
pub fn expm_minus_i(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = h.nrows();
    let a = h * Complex64::new(0.0, -t);
    let norm = one_norm(&a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * Complex64::new(scale, 0.0);
    let mut result = ComplexMatrix::identity(n, n);
    let mut term = ComplexMatrix::identity(n, n);
    for k in 1..=30 {
        term = (&term * &a) * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        if linalg::max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Trace out every factor except `keep`.
pub fn partial_trace(rho: &ComplexMatrix, factors: &[usize], keep: usize) -> ComplexMatrix {
    let dk = factors[keep];
    let inner: usize = factors[keep + 1..].iter().product();
    let outer: usize = factors[..keep].iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..dk {
                for b in 0..dk {
                    let r = (o * dk + a) * inner + i;
                    let c = (o * dk + b) * inner + i;
                    out[(a, b)] += rho[(r, c)];
                }
            }
        }
    }
    out
}

impl DenseModel {
    pub fn dimension(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn evolve(&self, t: f64) -> ComplexMatrix {
        self.evolve_state(&self.initial_state, t)
    }

    pub fn evolve_state(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let u = expm_minus_i(&self.hamiltonian, t);
        &u * rho * u.adjoint()
    }

    /// Factor index of qubit `i` (0-based pair index).
    pub fn qubit_factor(i: usize) -> usize {
        2 * i
    }

    pub fn bath_factor(i: usize) -> usize {
        2 * i + 1
    }

    pub fn reduce(&self, rho: &ComplexMatrix, factor: usize) -> ComplexMatrix {
        partial_trace(rho, &self.factors, factor)
    }

    pub fn energy(&self, rho: &ComplexMatrix) -> f64 {
        linalg::trace(&(rho * &self.hamiltonian)).re
    }
}

/// Evolve to time `t` and trace down to one factor.
pub fn dense_evolve_and_trace(model: &DenseModel, t: f64, factor: usize) -> ComplexMatrix {
    model.reduce(&model.evolve(t), factor)
}

/// Largest deviation found in one comparison case.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationCase {
    pub label: String,
    pub dimension: usize,
    pub times: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub cases: Vec<ValidationCase>,
    pub max_deviation: f64,
}

impl ValidationReport {
    fn from_cases(cases: Vec<ValidationCase>) -> Self {
        let max_deviation = cases.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
        ValidationReport { cases, max_deviation }
    }
}

fn max_diag_deviation(dense: &ComplexMatrix, values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (k, v) in values.iter().enumerate() {
        worst = worst.max((dense[(k, k)].re - v).abs());
    }
    // Off-diagonals of the reduced states vanish by symmetry.
    for r in 0..dense.nrows() {
        for c in 0..dense.ncols() {
            if r != c {
                worst = worst.max(dense[(r, c)].norm());
            }
        }
    }
    worst
}

/// Single-star reduced spin and bath states against the dense model.
pub fn compare_single_star(p: &SingleStarParams, times: &[f64]) -> Result<ValidationCase> {
    let model = build_dense_single(p)?;
    let mut worst = 0.0f64;
    for &t in times {
        let rho = model.evolve(t);
        let spin = model.reduce(&rho, 0);
        let r = star::reduced_spin_state(p, t)?.ground_population;
        worst = worst.max(max_diag_deviation(&spin, &[r, 1.0 - r]));
        let bath = model.reduce(&rho, 1);
        worst = worst.max(max_diag_deviation(&bath, &star::reduced_bath_state(p, t)?));
    }
    Ok(ValidationCase {
        label: format!(
            "single N={} eps={} E={} A={} beta={}",
            p.n_bath, p.epsilon, p.bath_energy, p.coupling, p.beta
        ),
        dimension: model.dimension(),
        times: times.to_vec(),
        max_deviation: worst,
    })
}

/// All three qubit and bath reduced states of the refrigerator against the dense model.
pub fn compare_refrigerator(p: &RefrigeratorParams, times: &[f64]) -> Result<ValidationCase> {
    let model = build_dense_refrigerator(p)?;
    let engine = Engine::new(*p, 0.0)?;
    let mut worst = 0.0f64;
    for &t in times {
        let rho = model.evolve(t);
        for i in 0..3 {
            let q = model.reduce(&rho, DenseModel::qubit_factor(i));
            let r = engine.reduced_qubit_state(i + 1, t)?.ground_population;
            worst = worst.max(max_diag_deviation(&q, &[r, 1.0 - r]));
            let b = model.reduce(&rho, DenseModel::bath_factor(i));
            worst = worst.max(max_diag_deviation(&b, &engine.reduced_bath_populations(i + 1, t)?));
        }
    }
    Ok(ValidationCase {
        label: format!(
            "refrigerator N={:?} A={:?} g={} autonomous={}",
            p.n_bath,
            p.coupling,
            p.g,
            p.is_autonomous()
        ),
        dimension: model.dimension(),
        times: times.to_vec(),
        max_deviation: worst,
    })
}

/// Single-star grid: N ≤ `max_n`, ε, E ∈ {0.5, 1, 2}, A ∈ {0.1, 0.5}, β ∈ {0.5, 1}.
pub fn single_star_grid(max_n: u32) -> Vec<SingleStarParams> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for &epsilon in &[0.5, 1.0, 2.0] {
            for &bath_energy in &[0.5, 1.0, 2.0] {
                for &coupling in &[0.1, 0.5] {
                    for &beta in &[0.5, 1.0] {
                        out.push(SingleStarParams {
                            epsilon,
                            bath_energy,
                            coupling,
                            n_bath: n,
                            beta,
                        });
                    }
                }
            }
        }
    }
    out
}

pub const SINGLE_STAR_TIMES: [f64; 3] = [0.0, 0.7, 3.1];
pub const REFRIGERATOR_TIMES: [f64; 3] = [0.0, 2.0, 5.0];

/// One autonomous and one non-autonomous parameter set for bath sizes `n`.
pub fn refrigerator_cases(n: [u32; 3]) -> [RefrigeratorParams; 2] {
    let autonomous = RefrigeratorParams {
        epsilon: [1.0, 2.0, 1.0],
        bath_energy: [2.0, 4.0, 2.0],
        coupling: [0.5, 0.5, 0.5],
        g: 0.05,
        n_bath: n,
        beta: [1.0, 1.0, 0.5],
    };
    let detuned = RefrigeratorParams {
        epsilon: [0.8, 1.7, 1.1],
        bath_energy: [1.3, 3.1, 2.4],
        coupling: [0.31, 0.74, 0.18],
        g: 0.27,
        n_bath: n,
        beta: [1.2, 0.9, 0.4],
    };
    [autonomous, detuned]
}

/// Full validation suite: the single-star grid up to `max_single_n` and the
/// refrigerator at `N = (1,1,1)` and `(2,1,1)`.
pub fn run_validation_suite(max_single_n: u32) -> Result<ValidationReport> {
    if max_single_n == 0 {
        return Err(invalid("max_single_n", "must be at least 1"));
    }
    run_validation_cases(max_single_n, &[[1, 1, 1], [2, 1, 1]])
}

/// Single-star grid up to `max_single_n` (none for 0) and both refrigerator
/// parameter sets at every bath size in `refrigerator_n`.
pub fn run_validation_cases(max_single_n: u32, refrigerator_n: &[[u32; 3]]) -> Result<ValidationReport> {
    let mut cases = Vec::new();
    for p in single_star_grid(max_single_n) {
        cases.push(compare_single_star(&p, &SINGLE_STAR_TIMES)?);
    }
    for &n in refrigerator_n {
        for p in refrigerator_cases(n) {
            cases.push(compare_refrigerator(&p, &REFRIGERATOR_TIMES)?);
        }
    }
    Ok(ValidationReport::from_cases(cases))
}
