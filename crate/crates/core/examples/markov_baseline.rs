//! Markovian three-qubit refrigerator with Ohmic baths: the cold-qubit
//! temperature over time and its minimum.

use csqar::engine::uniform_grid;
use csqar::markov::{build_jump_channels, markov_min_t1, markov_series, MarkovParams};

fn main() -> csqar::Result<()> {
    let p = MarkovParams::reference([7.98e-6, 2.67e-5, 3.13e-5], 0.0999197);
    for ch in build_jump_channels(&p)?.iter().filter(|c| c.frequency > 0.0) {
        println!("qubit {} omega = {:.4} rate = {:.4e}", ch.qubit_index, ch.frequency, ch.rate);
    }
    if let Some(w) = p.weak_coupling_warning() {
        println!("warning: {w}");
    }
    let grid = uniform_grid(0.0, 40.0, 0.1)?;
    let series = markov_series(&p, &grid)?;
    for k in (0..grid.len()).step_by(40) {
        println!("t = {:>5.1}  T1 = {:.5}  Qdot_B1 = {:+.3e}", grid[k], series.temperature[0][k], series.qdot_bath[0][k]);
    }
    let best = markov_min_t1(&p, &grid)?;
    println!("minimum T1 = {:.5} at t = {:.3}", best.t1, best.time);
    Ok(())
}
