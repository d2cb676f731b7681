//! Error type shared by every module of the crate.

use alloc::vec::Vec;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Validation and solver failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized: |sum of squared amplitudes - 1| = {drift:e}")]
    NotNormalized { drift: f64 },

    #[error("matrix is not Hermitian: max |M - M^dagger| entry = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace must be 1: |Tr M - 1| = {deviation:e}")]
    InvalidTrace { deviation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue = {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("subsystem subset must not be empty")]
    EmptySubset,

    #[error("operation supports {expected:?} subsystem dimensions, got {got:?}")]
    UnsupportedDims { expected: Vec<usize>, got: Vec<usize> },

    #[error("marginals for subsets {a:?} and {b:?} disagree on their overlap by {deviation:e}")]
    OverlapInconsistent {
        a: Vec<usize>,
        b: Vec<usize>,
        deviation: f64,
    },

    #[error("probabilities must be nonnegative and sum to 1 (deviation {deviation:e})")]
    InvalidDistribution { deviation: f64 },

    #[error("delta {delta} drives probability entry {index} below zero")]
    DeltaOutOfRange { delta: f64, index: usize },

    #[error("both superposition coefficients must be nonzero")]
    DegenerateCoefficients,

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}
