//! Dense complex linear algebra shared by the physics modules.
//!
//! Matrices here are small (at most 8x8 inside the sector engine, a few
//! hundred rows in the brute-force oracle), so everything is plain dense
//! `nalgebra` storage.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Hermiticity tolerance for inputs, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        scaled * v.adjoint()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.apply_function(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest |m_ij - conj(m_ji)|.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn from_real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn diagonal_matrix(entries: &[f64]) -> ComplexMatrix {
    let n = entries.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &p) in entries.iter().enumerate() {
        m[(i, i)] = Complex64::new(p, 0.0);
    }
    m
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    Ok(())
}

pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Spectrum> {
    check_square(h)?;
    let n = h.nrows();
    let scale = max_abs(h).max(1.0);
    let asymmetry = hermitian_defect(h);
    if asymmetry > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry });
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    // Symmetrize so roundoff-level asymmetry never reaches the solver.
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigenConvergence { dim: n })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `U ρ U†` with `U = exp(-i h t)`.
pub fn evolve_density(h: &ComplexMatrix, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spectrum = eig_hermitian(h)?;
    evolve_with_spectrum(&spectrum, rho0, t)
}

/// Same as [`evolve_density`] but reusing a precomputed spectrum.
pub fn evolve_with_spectrum(
    spectrum: &Spectrum,
    rho0: &ComplexMatrix,
    t: f64,
) -> Result<ComplexMatrix> {
    check_square(rho0)?;
    if rho0.nrows() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            got: rho0.nrows(),
        });
    }
    let u = spectrum.propagator(t);
    Ok(&u * rho0 * u.adjoint())
}
