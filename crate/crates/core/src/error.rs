use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition. `field` names the offender.
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("expected a point in the {expected} frame, got {found}")]
    FrameMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("point lies outside the configuration space: {0}")]
    OutOfDomain(String),

    #[error("potential is singular at x = {x}")]
    Singular { x: f64 },

    #[error("finite-difference stencil leaves the domain: {0}")]
    StencilOutOfDomain(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("domain truncation is not stable: {0}")]
    Truncation(String),

    #[error("solve failed at b = {b}: {source}")]
    AtOffset { b: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::AtOffset { source, .. } => source.is_numerical(),
            other => matches!(
                other,
                Error::Quadrature(_) | Error::NoConvergence(_) | Error::Truncation(_)
            ),
        }
    }
}
