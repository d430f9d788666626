//! Sector solutions against brute-force evolution in the full symmetric space.

use csqar::oracle::run_validation_cases;

fn main() -> csqar::Result<()> {
    let report = run_validation_cases(4, &[[1, 1, 1], [2, 1, 1]])?;
    for case in report.cases.iter().filter(|c| c.label.starts_with("refrigerator")) {
        println!("{:<70} dim {:>3}  max dev {:.2e}", case.label, case.dimension, case.max_deviation);
    }
    println!("{} cases, largest deviation {:.2e}", report.cases.len(), report.max_deviation);
    Ok(())
}
