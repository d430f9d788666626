//! Cooling optimization, timing of minima, and extrapolation in bath size.

pub mod cooling;
pub mod fit;
pub mod minima;
pub mod neville;
pub mod search;
pub mod sweep;

pub use cooling::{first_cooling_minimum, optimize_t1, CoolingObjective, OptimizationRanges, OptimizationResult};
pub use fit::{fit_power_law, AsymptotePolicy, FitResult};
pub use minima::{first_local_min, golden_section, LocalMinimum};
pub use neville::{neville_extrapolate, NevilleTableau};
pub use search::{minimize_in_box, Bounds, SearchOutcome, SearchSettings};
pub use sweep::{scaling_sweep, ScalingReport, ScalingRow, SweepSettings};
