use thiserror::Error;

/// Errors raised by the constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input does not lie in the Lie algebra or group it is supposed to.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate spectrum: eigenvalue gap {gap:.3e} below {tolerance:.1e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },

    /// A trailing minor vanished, so the point lies outside the open Gauss cell.
    #[error("Gauss decomposition failed: trailing minor of order {order} is {value:.3e}")]
    GaussDecomposition { order: usize, value: f64 },

    /// Point on (or numerically too close to) a wall of the Weyl chamber or a pole.
    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("point outside the Weyl chamber: {0}")]
    Chamber(String),

    #[error("non-generic point: {0}")]
    NonGeneric(String),

    /// Two independent evaluation routes disagree beyond tolerance.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("implicit midpoint step {step} did not converge after {iterations} iterations")]
    StepFailure { step: usize, iterations: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for the failures that mean "this phase-space point is not generic".
    pub fn is_non_generic(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSpectrum { .. }
                | Error::GaussDecomposition { .. }
                | Error::Singular(_)
                | Error::Chamber(_)
                | Error::NonGeneric(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
