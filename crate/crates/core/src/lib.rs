//! Exact verification of degeneration certificates for 8-dimensional
//! filiform Lie algebras.

pub mod deformation;
pub mod error;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod expr;
pub mod invariants;
pub mod lie;
pub mod linalg;
pub mod scalar;

pub use error::{Error, Result};
