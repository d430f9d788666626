//! Search couplings, three-body strength and time for the coldest cold qubit.
//! Usage: optimize_cold_qubit [N] [budget] [seed]

use csqar::analysis::cooling::{optimize_t1, OptimizationRanges};
use csqar::analysis::search::SearchSettings;
use csqar::RefrigeratorParams;

fn main() -> csqar::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(10) as u32;
    let settings = SearchSettings {
        budget: args.get(1).copied().unwrap_or(400) as usize,
        seed: args.get(2).copied().unwrap_or(1),
        ..SearchSettings::default()
    };
    let base = RefrigeratorParams::reference(n, [0.5; 3], 0.05);
    let result = optimize_t1(&base, &OptimizationRanges::default(), &settings, 1e-12)?;
    println!("N = {n}, {} evaluations", result.evaluations);
    println!("T1* = {:.5} at t* = {:.3}", result.best_t1, result.best_time);
    println!("A = {:?}, g = {:.5}", result.params.coupling, result.params.g);
    Ok(())
}
