use std::path::PathBuf;

use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("specialization at t = 0 of a scalar with a negative t-exponent")]
    ZeroSpecialization,
    #[error("t samples must be nonzero")]
    ZeroTSample,

    #[error("entry has a pole at t = 0: {0}")]
    NegativeExponent(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("determinant is not a Laurent unit: {0}")]
    NotAUnit(String),

    #[error("subspace is not invariant under the matrix: {0}")]
    NotInvariant(String),

    #[error("invalid deformation spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{path}: validation failed: {message}")]
    Validation { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;
