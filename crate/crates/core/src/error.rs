use thiserror::Error;

use crate::geometry::MeshError;
use crate::linalg::{LinalgError, SolveError};
use crate::local::MaterialError;
use crate::spaces::BcError;
use crate::verify::{ConfigError, VerifyError};

/// Top-level error type; each subsystem has its own enum.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    BoundaryConditions(#[from] BcError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical pipeline (singular systems, residual
    /// violations), as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Solve(_))
            || matches!(self, Error::Verify(VerifyError::ZeroNorm { .. }))
    }
}
