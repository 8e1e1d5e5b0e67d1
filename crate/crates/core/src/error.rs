use thiserror::Error;

use crate::mesh::ValidationReport;

/// Errors produced by the library. Validation findings are carried as data
/// (`ValidationReport`) so callers can inspect individual violations.
#[derive(Debug, Error)]
pub enum Error {
    /// A mesh-consuming operation was handed a mesh that fails validation.
    #[error("mesh validation failed: {0}")]
    InvalidMesh(ValidationReport),

    /// An argument was outside the operation's domain.
    #[error("{0}")]
    Domain(String),

    /// An iterative solver exhausted its iteration budget.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// A mesh file could not be parsed.
    #[error("malformed mesh file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedFile(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
