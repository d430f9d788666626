//! One central qubit homogeneously coupled (XY exchange) to a star of `N`
//! spin-1/2 bath spins, restricted to the symmetric Dicke ladder of the bath.
//!
//! `S^z + J^z` is conserved, so the joint space splits into sectors labelled
//! by `m`. Inside a sector the basis is
//!
//! * index 0: qubit ground `|-1/2>` with bath `|m + 1/2>`
//! * index 1: qubit excited `|+1/2>` with bath `|m - 1/2>`
//!
//! and the two edge sectors `m = ±(N/2 + 1/2)` keep only one of these.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::spin::{HalfInt, ReducedQubitState};

/// Parameters of a single central-spin system. Energies are in units of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleStarParams {
    pub epsilon: f64,
    pub bath_energy: f64,
    pub coupling: f64,
    pub n_bath: u32,
    pub beta: f64,
}

impl Default for SingleStarParams {
    fn default() -> Self {
        SingleStarParams {
            epsilon: 1.0,
            bath_energy: 2.0,
            coupling: 0.5,
            n_bath: 30,
            beta: 1.0,
        }
    }
}

impl SingleStarParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_bath < 1 {
            return Err(invalid("n_bath", "need at least one bath spin"));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(invalid("coupling", format!("must be finite and >= 0, got {}", self.coupling)));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(invalid("beta", format!("must be finite and > 0, got {}", self.beta)));
        }
        if !self.epsilon.is_finite() || !self.bath_energy.is_finite() {
            return Err(invalid("epsilon", "energies must be finite"));
        }
        Ok(())
    }

    /// Doubled value of the largest sector label, `N + 1`.
    fn edge_doubled(&self) -> i32 {
        self.n_bath as i32 + 1
    }

    /// Which of the two local basis states exist in sector `m`.
    pub fn local_states(&self, m: HalfInt) -> LocalStates {
        let edge = self.edge_doubled();
        match m.doubled() {
            d if d == -edge => LocalStates::GroundOnly,
            d if d == edge => LocalStates::ExcitedOnly,
            _ => LocalStates::Both,
        }
    }

    pub fn contains_sector(&self, m: HalfInt) -> bool {
        let d = m.doubled();
        let edge = self.edge_doubled();
        (-edge..=edge).contains(&d) && (d - edge) % 2 == 0
    }

    /// Diagonal energies `(b_-, b_+)` of the ground and excited sector states.
    pub fn diagonal_energies(&self, m: HalfInt) -> (f64, f64) {
        let mv = m.value();
        (
            -self.epsilon / 2.0 + self.bath_energy * (mv + 0.5),
            self.epsilon / 2.0 + self.bath_energy * (mv - 0.5),
        )
    }

    /// Off-diagonal exchange element `u = A sqrt((N/2 + m + 1/2)(N/2 - m + 1/2))`.
    pub fn exchange_element(&self, m: HalfInt) -> f64 {
        let n = f64::from(self.n_bath);
        let d = f64::from(m.doubled());
        let product = (n + d + 1.0) * (n - d + 1.0) / 4.0;
        self.coupling * product.max(0.0).sqrt()
    }

    /// Unnormalized log Boltzmann factors of the sector's ground and excited
    /// states under the initial product state `ρ_S^th ⊗ ρ_B^th`.
    pub fn log_weights(&self, m: HalfInt) -> (Option<f64>, Option<f64>) {
        let (b, e, mv) = (self.beta, self.bath_energy, m.value());
        let ground = b * self.epsilon / 2.0 - b * e * (mv + 0.5);
        let excited = -b * self.epsilon / 2.0 - b * e * (mv - 0.5);
        match self.local_states(m) {
            LocalStates::Both => (Some(ground), Some(excited)),
            LocalStates::GroundOnly => (Some(ground), None),
            LocalStates::ExcitedOnly => (None, Some(excited)),
        }
    }

    /// Log of the sector's unnormalized trace.
    pub fn log_sector_weight(&self, m: HalfInt) -> f64 {
        match self.log_weights(m) {
            (Some(g), Some(e)) => log_add(g, e),
            (Some(g), None) => g,
            (None, Some(e)) => e,
            (None, None) => f64::NEG_INFINITY,
        }
    }

    /// Initial ground population within sector `m` (normalized per sector).
    pub fn initial_ground_fraction(&self, m: HalfInt) -> f64 {
        match self.log_weights(m) {
            (Some(g), Some(e)) => 1.0 / (1.0 + (e - g).exp()),
            (Some(_), None) => 1.0,
            _ => 0.0,
        }
    }
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Basis content of a local qubit-bath sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalStates {
    Both,
    GroundOnly,
    ExcitedOnly,
}

impl LocalStates {
    pub fn dim(self) -> usize {
        match self {
            LocalStates::Both => 2,
            _ => 1,
        }
    }

    /// Qubit-ground flags of the available states, in basis order.
    pub fn ground_flags(self) -> &'static [bool] {
        match self {
            LocalStates::Both => &[true, false],
            LocalStates::GroundOnly => &[true],
            LocalStates::ExcitedOnly => &[false],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarSector {
    pub m: HalfInt,
    pub states: LocalStates,
}

impl StarSector {
    pub fn is_one_dimensional(&self) -> bool {
        self.states.dim() == 1
    }
}

/// All sectors `m = -N/2 - 1/2, ..., N/2 + 1/2` in ascending order.
pub fn enumerate_sectors(p: &SingleStarParams) -> Vec<StarSector> {
    let edge = p.edge_doubled();
    (-edge..=edge)
        .step_by(2)
        .map(|d| {
            let m = HalfInt::from_doubled(d);
            StarSector {
                m,
                states: p.local_states(m),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorHamiltonian2x2 {
    pub m: HalfInt,
    pub b_minus: f64,
    pub b_plus: f64,
    pub u: f64,
    /// `sqrt(u² + (b_- - b_+)²/4)`.
    pub theta: f64,
}

impl SectorHamiltonian2x2 {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.b_minus, self.u, self.u, self.b_plus])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SectorHamiltonian {
    TwoLevel(SectorHamiltonian2x2),
    /// Edge sector with a single state of the given energy.
    OneLevel {
        m: HalfInt,
        energy: f64,
        states: LocalStates,
    },
}

pub fn sector_hamiltonian(p: &SingleStarParams, m: HalfInt) -> Result<SectorHamiltonian> {
    if !p.contains_sector(m) {
        return Err(invalid("m", format!("sector {m} does not exist for N = {}", p.n_bath)));
    }
    let (b_minus, b_plus) = p.diagonal_energies(m);
    Ok(match p.local_states(m) {
        LocalStates::Both => {
            let u = p.exchange_element(m);
            let half_gap = (b_minus - b_plus) / 2.0;
            SectorHamiltonian::TwoLevel(SectorHamiltonian2x2 {
                m,
                b_minus,
                b_plus,
                u,
                theta: (u * u + half_gap * half_gap).sqrt(),
            })
        }
        states @ LocalStates::GroundOnly => SectorHamiltonian::OneLevel { m, energy: b_minus, states },
        states @ LocalStates::ExcitedOnly => SectorHamiltonian::OneLevel { m, energy: b_plus, states },
    })
}

/// Normalized state of one sector: populations and the ground/excited coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorState {
    pub m: HalfInt,
    pub c_gg: f64,
    pub c_ee: f64,
    /// `<ground|ρ_m|excited>`; the other coherence is its conjugate.
    #[serde(skip)]
    pub c_ge: Complex64,
}

impl SectorState {
    pub fn c_eg(&self) -> Complex64 {
        self.c_ge.conj()
    }
}

/// Evolve the normalized thermal state of sector `m` to time `t` by exact
/// diagonalization of the 2x2 sector Hamiltonian.
pub fn evolve_sector(p: &SingleStarParams, m: HalfInt, t: f64) -> Result<SectorState> {
    p.validate()?;
    match sector_hamiltonian(p, m)? {
        SectorHamiltonian::OneLevel { states, .. } => {
            let ground = matches!(states, LocalStates::GroundOnly);
            Ok(SectorState {
                m,
                c_gg: if ground { 1.0 } else { 0.0 },
                c_ee: if ground { 0.0 } else { 1.0 },
                c_ge: Complex64::new(0.0, 0.0),
            })
        }
        SectorHamiltonian::TwoLevel(h) => {
            let p0 = p.initial_ground_fraction(m);
            let rho0 = linalg::diagonal_matrix(&[p0, 1.0 - p0]);
            let hm: ComplexMatrix = linalg::from_real(&h.matrix());
            let rho = linalg::evolve_density(&hm, &rho0, t)?;
            Ok(SectorState {
                m,
                c_gg: rho[(0, 0)].re,
                c_ee: rho[(1, 1)].re,
                c_ge: rho[(0, 1)],
            })
        }
    }
}

/// Normalized sector weights `w_m` (sum to 1), in the order of [`enumerate_sectors`].
pub fn sector_weights(p: &SingleStarParams) -> Vec<(StarSector, f64)> {
    let sectors = enumerate_sectors(p);
    let logs: Vec<f64> = sectors.iter().map(|s| p.log_sector_weight(s.m)).collect();
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - hi).exp()).collect();
    let total: f64 = raw.iter().sum();
    sectors.into_iter().zip(raw.into_iter().map(|w| w / total)).collect()
}

fn evolved_sectors(p: &SingleStarParams, t: f64) -> Result<Vec<(SectorState, f64)>> {
    sector_weights(p)
        .into_iter()
        .map(|(s, w)| evolve_sector(p, s.m, t).map(|state| (state, w)))
        .collect()
}

/// Reduced state of the central qubit at time `t`.
pub fn reduced_spin_state(p: &SingleStarParams, t: f64) -> Result<ReducedQubitState> {
    let r = evolved_sectors(p, t)?
        .iter()
        .map(|(s, w)| w * s.c_gg)
        .sum();
    Ok(ReducedQubitState {
        qubit_index: 1,
        ground_population: r,
        time: t,
    })
}

/// `dr/dt` of the central qubit's ground population, from the sector coherences.
pub fn spin_population_rate(p: &SingleStarParams, t: f64) -> Result<f64> {
    let mut rate = 0.0;
    for (s, w) in evolved_sectors(p, t)? {
        if let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(p, s.m)? {
            rate += w * (-2.0 * h.u * s.c_ge.im);
        }
    }
    Ok(rate)
}

/// `(Q̇_S, Q̇_B)` of the single star: `-ε dr/dt` and `E dr/dt`.
pub fn single_heat_currents(p: &SingleStarParams, t: f64) -> Result<(f64, f64)> {
    let rate = spin_population_rate(p, t)?;
    Ok((-p.epsilon * rate, p.bath_energy * rate))
}

/// Diagonal of the reduced bath state, indexed by `m_B = -N/2, ..., N/2`.
pub fn reduced_bath_state(p: &SingleStarParams, t: f64) -> Result<Vec<f64>> {
    let n = p.n_bath as usize;
    let mut pops = vec![0.0; n + 1];
    // Ground component of sector m sits at m_B = m + 1/2, excited at m - 1/2.
    // Bath index k corresponds to doubled m_B = 2k - N.
    for (s, w) in evolved_sectors(p, t)? {
        let d = s.m.doubled();
        let n_i = n as i32;
        let ground_idx = (d + 1 + n_i) / 2;
        let excited_idx = (d - 1 + n_i) / 2;
        if (0..=n_i).contains(&ground_idx) {
            pops[ground_idx as usize] += w * s.c_gg;
        }
        if (0..=n_i).contains(&excited_idx) {
            pops[excited_idx as usize] += w * s.c_ee;
        }
    }
    Ok(pops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::thermal_ground_population;

    fn params(epsilon: f64, bath_energy: f64, coupling: f64, n_bath: u32, beta: f64) -> SingleStarParams {
        SingleStarParams {
            epsilon,
            bath_energy,
            coupling,
            n_bath,
            beta,
        }
    }

    #[test]
    fn sector_enumeration() {
        let s1 = enumerate_sectors(&params(1.0, 1.0, 0.5, 1, 1.0));
        let ms: Vec<f64> = s1.iter().map(|s| s.m.value()).collect();
        assert_eq!(ms, vec![-1.0, 0.0, 1.0]);
        assert!(s1[0].is_one_dimensional() && s1[2].is_one_dimensional());
        assert!(!s1[1].is_one_dimensional());

        let s2 = enumerate_sectors(&params(1.0, 1.0, 0.5, 2, 1.0));
        let ms: Vec<f64> = s2.iter().map(|s| s.m.value()).collect();
        assert_eq!(ms, vec![-1.5, -0.5, 0.5, 1.5]);

        assert_eq!(enumerate_sectors(&params(1.0, 1.0, 0.5, 30, 1.0)).len(), 32);
    }

    #[test]
    fn sector_hamiltonian_resonant_example() {
        let a = 0.37;
        let p = params(1.0, 1.0, a, 2, 1.0);
        let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(&p, HalfInt::from_doubled(1)).unwrap() else {
            panic!("expected a two-level sector");
        };
        assert_eq!(h.b_minus - h.b_plus, 0.0);
        assert!((h.u - a * 2f64.sqrt()).abs() < 1e-15);
        assert!((h.theta - a * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diagonal_gap_is_m_independent() {
        let p = params(1.0, 2.0, 0.4, 5, 1.0);
        for s in enumerate_sectors(&p) {
            if let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(&p, s.m).unwrap() {
                assert_eq!(h.b_minus - h.b_plus, 1.0);
            }
        }
    }

    #[test]
    fn decoupled_limit() {
        let p = params(1.0, 2.5, 0.0, 4, 1.0);
        for s in enumerate_sectors(&p) {
            if let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(&p, s.m).unwrap() {
                assert_eq!(h.u, 0.0);
                assert!((h.theta - 0.75).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn edge_sectors_are_one_level() {
        let p = params(1.0, 2.0, 0.5, 3, 1.0);
        let lo = sector_hamiltonian(&p, HalfInt::from_doubled(-4)).unwrap();
        let hi = sector_hamiltonian(&p, HalfInt::from_doubled(4)).unwrap();
        assert!(matches!(lo, SectorHamiltonian::OneLevel { energy, .. } if (energy - (-0.5 - 3.0)).abs() < 1e-15));
        assert!(matches!(hi, SectorHamiltonian::OneLevel { energy, .. } if (energy - (0.5 + 3.0)).abs() < 1e-15));
        assert!(sector_hamiltonian(&p, HalfInt::from_doubled(6)).is_err());
        assert!(sector_hamiltonian(&p, HalfInt::from_doubled(1)).is_err());
    }

    #[test]
    fn initial_sector_state_matches_closed_form() {
        let p = params(1.0, 2.0, 0.5, 4, 0.8);
        let s = evolve_sector(&p, HalfInt::from_doubled(1), 0.0).unwrap();
        let expected = 1.0 / (1.0 + (p.beta * (p.bath_energy - p.epsilon)).exp());
        assert!((s.c_gg - expected).abs() < 1e-14);
    }

    #[test]
    fn frozen_without_coupling() {
        let p = params(1.0, 2.0, 0.0, 4, 1.0);
        let s0 = evolve_sector(&p, HalfInt::from_doubled(-1), 0.0).unwrap();
        let s1 = evolve_sector(&p, HalfInt::from_doubled(-1), 3.7).unwrap();
        assert!((s0.c_gg - s1.c_gg).abs() < 1e-14);
        assert!(s1.c_ge.norm() < 1e-14);
        let r0 = reduced_spin_state(&p, 0.0).unwrap().ground_population;
        let r1 = reduced_spin_state(&p, 5.0).unwrap().ground_population;
        assert!((r0 - r1).abs() < 1e-14);
        let b0 = reduced_bath_state(&p, 0.0).unwrap();
        let b1 = reduced_bath_state(&p, 5.0).unwrap();
        assert!(b0.iter().zip(&b1).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn resonance_from_pure_ground() {
        // Very large beta(E - ε) is not available at resonance, so drive the
        // sector Hamiltonian directly: U = e^{-ibt}(cos(ut) - i sin(ut) σx).
        let p = params(1.3, 1.3, 0.45, 3, 1.0);
        let m = HalfInt::from_doubled(0);
        let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(&p, m).unwrap() else {
            panic!()
        };
        let rho0 = linalg::diagonal_matrix(&[1.0, 0.0]);
        for &t in &[0.3, 1.1, 4.0] {
            let rho = linalg::evolve_density(&linalg::from_real(&h.matrix()), &rho0, t).unwrap();
            let expected = (h.u * t).sin().powi(2);
            assert!((rho[(1, 1)].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_start() {
        let p = params(1.0, 2.0, 0.5, 6, 1.0);
        let r = reduced_spin_state(&p, 0.0).unwrap().ground_population;
        assert!((r - thermal_ground_population(1.0, 1.0)).abs() < 1e-12);
        assert!((r - 0.7311).abs() < 1e-4);

        let q = params(1.0, 1.0, 0.5, 1, 1.0);
        let bath = reduced_bath_state(&q, 0.0).unwrap();
        let h = 0.5f64.exp();
        let z = h + 1.0 / h;
        assert!((bath[0] - h / z).abs() < 1e-12);
        assert!((bath[1] - 1.0 / (h * z)).abs() < 1e-12);
    }

    #[test]
    fn sector_trace_and_populations_are_normalized() {
        let p = params(0.5, 2.0, 0.5, 6, 0.5);
        for s in enumerate_sectors(&p) {
            for &t in &[0.0, 0.7, 3.1] {
                let st = evolve_sector(&p, s.m, t).unwrap();
                assert!((st.c_gg + st.c_ee - 1.0).abs() < 1e-12);
                assert!(st.c_gg > -1e-12 && st.c_gg < 1.0 + 1e-12);
            }
        }
        let bath = reduced_bath_state(&p, 2.2).unwrap();
        assert!((bath.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn population_rate_matches_finite_difference() {
        let p = SingleStarParams {
            epsilon: 1.0,
            bath_energy: 1.7,
            coupling: 0.4,
            n_bath: 5,
            beta: 0.8,
        };
        let h = 1e-5;
        for t in [0.3, 1.1, 4.0] {
            let up = reduced_spin_state(&p, t + h).unwrap().ground_population;
            let down = reduced_spin_state(&p, t - h).unwrap().ground_population;
            let fd = (up - down) / (2.0 * h);
            assert!((spin_population_rate(&p, t).unwrap() - fd).abs() < 1e-8);
        }
    }
}
