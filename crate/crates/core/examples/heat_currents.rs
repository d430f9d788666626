//! Heat flowing through qubits and baths, split by channel, and the sign
//! pattern of the cold qubit's currents while it cools.

use csqar::engine::uniform_grid;
use csqar::thermo::{heat_breakdown, sign_report};
use csqar::{Engine, RefrigeratorParams};

fn main() -> csqar::Result<()> {
    let params = RefrigeratorParams::reference(20, [1.0, 0.98, 0.45], 0.1);
    let engine = Engine::new(params, 1e-12)?;
    for t in [0.1, 0.5, 1.0, 3.0] {
        let h = heat_breakdown(&engine, t)?;
        println!("t = {t}");
        for i in 0..3 {
            println!(
                "  pair {}: Qdot_S = {:+.5e}  Qdot_B = {:+.5e}  Qdot_SB = {:+.5e}",
                i + 1,
                h.qdot_system[i],
                h.qdot_bath[i],
                h.qdot_coupling[i]
            );
        }
        println!("  interaction {:+.5e}, total {:+.2e}", h.qdot_interaction, h.total());
    }
    let series = engine.refrigerator_series(&uniform_grid(0.0, 10.0, 0.01)?)?;
    let report = sign_report(&series);
    println!(
        "while T1 falls: {} samples, {:.1}% with Qdot_S1 < 0 < Qdot_B1",
        report.cooling_samples,
        100.0 * report.cooling_sign_fraction
    );
    println!("intervals with every bath gaining energy: {:?}", report.all_baths_positive);
    Ok(())
}
