use csqar::oracle::{build_dense_single, compare_single_star, single_star_grid};
use csqar::star::{
    enumerate_sectors, evolve_sector, reduced_bath_state, reduced_spin_state, sector_hamiltonian, SectorHamiltonian,
};
use csqar::SingleStarParams;
use proptest::prelude::*;

/// Frozen from the dense oracle (N = 2, ε = 1, E = 2, A = 0.5, β = 1, t = 1).
const ORACLE_R_AT_1: f64 = 0.795_780_645_295_447_3;

fn example() -> SingleStarParams {
    SingleStarParams {
        epsilon: 1.0,
        bath_energy: 2.0,
        coupling: 0.5,
        n_bath: 2,
        beta: 1.0,
    }
}

#[test]
fn small_star_matches_frozen_oracle_value() {
    let p = example();
    let r = reduced_spin_state(&p, 1.0).unwrap().ground_population;
    assert!((r - ORACLE_R_AT_1).abs() < 1e-12);
    let model = build_dense_single(&p).unwrap();
    let dense = model.reduce(&model.evolve(1.0), 0);
    assert!((dense[(0, 0)].re - r).abs() < 1e-12);
    let bath = reduced_bath_state(&p, 1.0).unwrap();
    let dense_bath = model.reduce(&model.evolve(1.0), 1);
    for (k, b) in bath.iter().enumerate() {
        assert!((dense_bath[(k, k)].re - b).abs() < 1e-12);
    }
}

#[test]
fn oracle_grid_up_to_four_spins() {
    for p in single_star_grid(4) {
        let case = compare_single_star(&p, &[0.0, 0.7, 3.1]).unwrap();
        assert!(case.max_deviation < 1e-9, "{}: {}", case.label, case.max_deviation);
    }
}

/// Rabi closed forms with `sin²` and `cos²` of the mixing angle written as
/// `u²/θ²` and `1 − u²/θ²`, and the coherence
/// `ρ_ge = (p_e − p_g)/2 [ (δu/θ²)(cos 2θt − 1) − i (u/θ) sin 2θt ]`, `δ = (b_- − b_+)/2`.
#[test]
fn closed_forms_match_sector_evolution() {
    for p in single_star_grid(6) {
        for s in enumerate_sectors(&p) {
            let SectorHamiltonian::TwoLevel(h) = sector_hamiltonian(&p, s.m).unwrap() else {
                continue;
            };
            let ratio = (p.beta * (p.bath_energy - p.epsilon)).exp();
            let pg = 1.0 / (ratio + 1.0);
            let pe = ratio / (ratio + 1.0);
            let s2 = h.u * h.u / (h.theta * h.theta);
            let delta = (h.b_minus - h.b_plus) / 2.0;
            for t in [0.0, 0.7, 3.1, 12.3] {
                let c = (2.0 * h.theta * t).cos();
                let sn = (2.0 * h.theta * t).sin();
                let gg = pg * ((1.0 + c) / 2.0 * s2 + (1.0 - s2)) + pe * (1.0 - c) / 2.0 * s2;
                let ee = pg * (1.0 - c) / 2.0 * s2 + pe * ((1.0 + c) / 2.0 * s2 + (1.0 - s2));
                let re = (pe - pg) / 2.0 * delta * h.u / (h.theta * h.theta) * (c - 1.0);
                let im = -(pe - pg) / 2.0 * h.u / h.theta * sn;
                let st = evolve_sector(&p, s.m, t).unwrap();
                assert!((st.c_gg - gg).abs() < 1e-10);
                assert!((st.c_ee - ee).abs() < 1e-10);
                assert!((st.c_ge.re - re).abs() < 1e-10, "{} vs {}", st.c_ge.re, re);
                assert!((st.c_ge.im - im).abs() < 1e-10, "{} vs {}", st.c_ge.im, im);
            }
        }
    }
}

fn star() -> impl Strategy<Value = SingleStarParams> {
    (0.2..3.0f64, 0.2..4.0f64, 0.01..1.5f64, 1u32..40, 0.1..3.0f64).prop_map(|(epsilon, bath_energy, coupling, n_bath, beta)| {
        SingleStarParams {
            epsilon,
            bath_energy,
            coupling,
            n_bath,
            beta,
        }
    })
}

fn total_spin_z(p: &SingleStarParams, t: f64) -> f64 {
    let r = reduced_spin_state(p, t).unwrap().ground_population;
    let half = f64::from(p.n_bath) / 2.0;
    let bath: f64 = reduced_bath_state(p, t)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(k, w)| w * (k as f64 - half))
        .sum();
    0.5 - r + bath
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spin_z_is_conserved(p in star(), t in 0.0..60.0f64) {
        prop_assert!((total_spin_z(&p, t) - total_spin_z(&p, 0.0)).abs() < 1e-10);
    }

    #[test]
    fn sector_traces_stay_one(p in star(), t in 0.0..60.0f64) {
        for s in enumerate_sectors(&p) {
            let st = evolve_sector(&p, s.m, t).unwrap();
            prop_assert!((st.c_gg + st.c_ee - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn populations_stay_physical(p in star(), t in 0.0..60.0f64) {
        let r = reduced_spin_state(&p, t).unwrap().ground_population;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r));
        let bath = reduced_bath_state(&p, t).unwrap();
        prop_assert!((bath.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(bath.iter().all(|&w| w > -1e-12));
    }
}
