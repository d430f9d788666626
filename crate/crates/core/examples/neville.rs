//! Polynomial extrapolation to h = 1/N -> 0 with the full tableau.

use csqar::analysis::neville::neville_extrapolate;

fn main() -> csqar::Result<()> {
    let data = [(2.0, 0.50228), (4.0, 0.47557), (7.0, 0.46675), (14.0, 0.46041), (50.0, 0.45663)];
    let points: Vec<(f64, f64)> = data.iter().map(|&(n, t)| (1.0 / n, t)).collect();
    let tab = neville_extrapolate(&points, 0.0)?;
    for (m, row) in tab.tableau.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.5}")).collect();
        println!("degree {m}: {}", cells.join("  "));
    }
    println!("extrapolated value {:.5}", tab.extrapolated);
    println!("D along the lower diagonal: {:?}", tab.lower_diagonal_d());
    if let Some(w) = tab.stability_warning {
        println!("warning: {w}");
    }
    Ok(())
}
