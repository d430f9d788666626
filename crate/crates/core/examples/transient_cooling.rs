//! Temperatures of the three qubits with 30-spin baths at couplings close to
//! the optimum, and the first local minimum of the cold-qubit temperature.

use csqar::analysis::cooling::first_cooling_minimum;
use csqar::engine::uniform_grid;
use csqar::{Engine, RefrigeratorParams};

fn main() -> csqar::Result<()> {
    let params = RefrigeratorParams::reference(30, [1.0, 0.989, 0.935], 0.1);
    let engine = Engine::new(params, 1e-12)?;
    println!("{} sectors kept of {}", engine.sectors().len(), engine.sector_set().total_count);

    let grid = uniform_grid(0.0, 10.0, 0.005)?;
    let series = engine.refrigerator_series(&grid)?;
    for k in (0..grid.len()).step_by(200) {
        println!(
            "t = {:>5.2}  T1 = {:.4}  T2 = {:.4}  T3 = {:.4}",
            grid[k], series.temperature[0][k], series.temperature[1][k], series.temperature[2][k]
        );
    }
    let (k, t1) = series.temperature[0]
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &t)| if t > 0.0 && t < acc.1 { (k, t) } else { acc });
    println!("lowest T1 on the grid: {t1:.5} at t = {:.3}", grid[k]);
    for q in 1..3 {
        let low = series.temperature[q].iter().cloned().filter(|t| *t > 0.0).fold(f64::INFINITY, f64::min);
        println!("lowest T{} = {low:.4} (initial {:.1})", q + 1, 1.0 / params.beta[q]);
    }
    let first = first_cooling_minimum(&params, &grid, 1e-12)?;
    println!("first local minimum: {first:?}");
    Ok(())
}
