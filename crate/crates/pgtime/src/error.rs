use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series did not meet the truncation criterion within `max_terms`.
    #[error("series did not converge within {max_terms} terms (last relative term {last_rel:.3e})")]
    ConvergenceFailure { max_terms: usize, last_rel: f64 },
    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    /// A statistical check was handed fewer samples than it needs.
    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
    /// Binning for a goodness-of-fit test collapsed to too few usable cells.
    #[error("degenerate binning: {0}")]
    DegenerateBinning(String),
    /// `suite_run` was asked for a suite that does not exist.
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Checks that a value is finite and strictly positive.
pub(crate) fn require_pos(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("{name} must be finite and > 0, got {x}")));
    }
    Ok(())
}

/// Checks that a value is finite and non-negative.
pub(crate) fn require_nonneg(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("{name} must be finite and >= 0, got {x}")));
    }
    Ok(())
}
