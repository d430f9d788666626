//! Exact simulation of a three-qubit quantum absorption refrigerator whose
//! qubits each couple to a finite spin-star bath, with a Markovian baseline
//! and tools for locating and extrapolating transient cooling minima.

pub mod analysis;
pub mod config;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod oracle;
pub mod run;
pub mod spin;
pub mod star;
pub mod thermo;

pub use engine::{Engine, RefrigeratorParams};
pub use error::{Error, Result};
pub use spin::{HalfInt, LocalTemperature, ReducedQubitState};
pub use star::SingleStarParams;
