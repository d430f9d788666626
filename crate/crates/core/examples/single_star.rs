//! One qubit coupled to a spin-star bath: exact populations, local
//! temperature, bath distribution and heat currents.

use csqar::star::{reduced_bath_state, reduced_spin_state, single_heat_currents};
use csqar::SingleStarParams;

fn main() -> csqar::Result<()> {
    let p = SingleStarParams {
        epsilon: 1.0,
        bath_energy: 2.0,
        coupling: 0.5,
        n_bath: 10,
        beta: 1.0,
    };
    println!("{:>6} {:>10} {:>10} {:>12} {:>12}", "t", "r", "T", "Qdot_S", "Qdot_B");
    for k in 0..=10 {
        let t = 0.5 * k as f64;
        let state = reduced_spin_state(&p, t)?;
        let temp = state.temperature(p.epsilon)?.value();
        let (qs, qb) = single_heat_currents(&p, t)?;
        println!("{t:>6.2} {:>10.6} {temp:>10.6} {qs:>12.3e} {qb:>12.3e}", state.ground_population);
    }
    let bath = reduced_bath_state(&p, 2.0)?;
    println!("bath populations at t = 2 (m_B = -N/2 ... N/2):");
    for (k, w) in bath.iter().enumerate() {
        println!("  {:>5.1} {w:.6}", k as f64 - f64::from(p.n_bath) / 2.0);
    }
    Ok(())
}
