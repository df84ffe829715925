//! Numerical checks for binding in Bernstein-dispersion particle–field models.

pub mod bernstein;
pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod krylov;
pub mod onebody;
pub mod operators;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
