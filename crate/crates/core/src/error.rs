use thiserror::Error;

/// Errors raised by the library. Each variant maps to one CLI exit class.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
    /// Input violates a structural or geometric invariant of a cone surface.
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    /// A caller-side precondition does not hold (unknown label, bad targets, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Weights outside the admissible domain.
    #[error("inadmissible weights: {0}")]
    Inadmissible(String),
    /// Degenerate geometry (lightlike direction, flat triangle, ...).
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// An iterative procedure hit its iteration bound.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// An internal consistency check failed.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
