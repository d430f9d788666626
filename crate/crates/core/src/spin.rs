//! Half-integer quantum numbers and local-temperature bookkeeping.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A half-integer stored as twice its value, so sector arithmetic stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn plus_half(self) -> Self {
        HalfInt(self.0 + 1)
    }

    pub const fn minus_half(self) -> Self {
        HalfInt(self.0 - 1)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Diagonal state of one qubit, as read off a reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedQubitState {
    /// 1-based qubit index (1 = cold, 2 = room, 3 = hot).
    pub qubit_index: usize,
    pub ground_population: f64,
    pub time: f64,
}

impl ReducedQubitState {
    pub fn excited_population(&self) -> f64 {
        1.0 - self.ground_population
    }

    pub fn temperature(&self, epsilon: f64) -> Result<LocalTemperature> {
        local_temperature(self.ground_population, epsilon)
    }
}

/// Temperature assigned to a diagonal qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalTemperature {
    Positive(f64),
    /// Population inversion (r < 1/2).
    Negative(f64),
    /// Equal populations.
    Infinite,
}

impl LocalTemperature {
    /// Numeric value; infinite temperature maps to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            LocalTemperature::Positive(t) | LocalTemperature::Negative(t) => t,
            LocalTemperature::Infinite => f64::INFINITY,
        }
    }

    pub fn is_inverted(self) -> bool {
        matches!(self, LocalTemperature::Negative(_))
    }
}

/// `T = ε / ln(r / (1 - r))` for ground population `r`.
pub fn local_temperature(r: f64, epsilon: f64) -> Result<LocalTemperature> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::PopulationDomain(r));
    }
    let log_ratio = (r / (1.0 - r)).ln();
    if log_ratio == 0.0 {
        return Ok(LocalTemperature::Infinite);
    }
    let t = epsilon / log_ratio;
    Ok(if t > 0.0 {
        LocalTemperature::Positive(t)
    } else {
        LocalTemperature::Negative(t)
    })
}

/// Ground-state population of a qubit of splitting `epsilon` at inverse temperature `beta`.
pub fn thermal_ground_population(epsilon: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-beta * epsilon).exp())
}
