//! Optimal cold-qubit temperature against bath size with a power-law fit and
//! polynomial extrapolation to infinite baths. A small sweep by default;
//! pass `full` for bath sizes up to 50.

use csqar::analysis::fit::AsymptotePolicy;
use csqar::analysis::search::SearchSettings;
use csqar::analysis::sweep::{scaling_sweep, SweepSettings};
use csqar::RefrigeratorParams;

fn main() -> csqar::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let settings = if full {
        SweepSettings::default()
    } else {
        SweepSettings {
            n_values: vec![2, 4, 7, 10, 14],
            neville_n: vec![2, 4, 7, 14],
            search: SearchSettings { budget: 400, ..SearchSettings::default() },
            asymptote: AsymptotePolicy::Fixed(0.457),
            ..SweepSettings::default()
        }
    };
    let template = RefrigeratorParams::reference(2, [0.5; 3], 0.05);
    let report = scaling_sweep(&template, &settings)?;
    println!("{:>4} {:>9} {:>8} {:>9}", "N", "T1*", "t*", "t_l");
    for row in &report.rows {
        println!(
            "{:>4} {:>9.5} {:>8.3} {:>9.4}",
            row.n,
            row.optimum.best_t1,
            row.optimum.best_time,
            row.first_min_time.unwrap_or(f64::NAN)
        );
    }
    match &report.t1_fit {
        Some(f) => println!("T1 fit: T_inf = {:.4}, a = {:.4}, b = {:.4}, sigma = {:.4}", f.t_inf, f.a, f.b, f.sigma),
        None => println!("T1 fit failed: {:?}", report.t1_fit_error),
    }
    if let Some(tab) = &report.t1_neville {
        println!("T1 extrapolated: {:.4}, D along lower diagonal {:?}", tab.extrapolated, tab.lower_diagonal_d());
    }
    if let Some(f) = &report.tl_fit {
        println!("t_l fit: t_inf = {:.4}, x = {:.3}, y = {:.3}", f.t_inf, f.a, f.b);
    }
    Ok(())
}
