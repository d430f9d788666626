use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigendecomposition failed to converge for a {dim}x{dim} matrix")]
    EigenConvergence { dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("population {0} outside the open interval (0, 1)")]
    PopulationDomain(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dense model would need dimension {required}, above the cap of {cap}")]
    DimensionCap { required: usize, cap: usize },

    #[error("empty search range for `{0}`")]
    EmptyRange(&'static str),

    #[error("duplicate abscissa {0} in extrapolation data")]
    DuplicateAbscissa(f64),

    #[error("value {value} at N={n} is not above the asymptote {asymptote}")]
    NonPositiveResidual { n: f64, value: f64, asymptote: f64 },

    #[error("not enough data: need at least {needed}, got {got}")]
    NotEnoughData { needed: usize, got: usize },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("time grid must be strictly increasing (violated at index {0})")]
    NonMonotonicGrid(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
