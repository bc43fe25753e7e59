//! Empirical verification lab for the sparse sign-consistent JL transform.
//!
//! The core crate states closed-form guarantees; this crate puts numbers next
//! to them. It runs seeded Monte Carlo experiments over the matrix law
//! (moment checks, tail curves, the distributional JL property, MGF
//! dominance, a dense-sign baseline), computes exact reference distributions
//! for instances small enough to enumerate, and emits versioned JSON reports
//! with pass/fail verdicts. The `sscjl` binary is a thin CLI over these
//! pieces.
//!
//! Everything is deterministic given the master seed: trials map to fixed
//! RNG streams, counters are accumulated in integers, and floating-point
//! reductions run in trial order regardless of thread count.

pub mod cli;
pub mod enumeration;
pub mod io;
pub mod montecarlo;
pub mod report;
pub mod stats;

use thiserror::Error;

/// Unified lab error; every variant maps onto one of the CLI exit codes.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Params(#[from] sscjl_core::ParamError),
    #[error(transparent)]
    Sampler(#[from] sscjl_core::SamplerError),
    #[error(transparent)]
    Transform(#[from] sscjl_core::TransformError),
    #[error(transparent)]
    Bounds(#[from] sscjl_core::BoundsError),
    /// A CLI or API argument outside its domain (trial counts, grids, ...).
    #[error("{0}")]
    InvalidArgument(String),
    /// Exact enumeration would be too large to finish.
    #[error("enumeration needs {configurations} configurations, limit is {limit}")]
    Capacity { configurations: u128, limit: u64 },
    /// The input held no vectors.
    #[error("input holds no vectors")]
    EmptyInput,
    /// A vector line has the wrong number of fields.
    #[error("line {line}: expected {expected} fields, got {got}")]
    Ragged { line: usize, expected: usize, got: usize },
    /// A field failed to parse as a number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A parsed coordinate was NaN or infinite.
    #[error("line {line}: non-finite coordinate")]
    NonFiniteInput { line: usize },
    /// A matrix file failed validation.
    #[error("matrix file: {message}")]
    BadMatrixFile { message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Process exit code for this error: 2 for parameter and domain errors,
    /// 3 for data and IO errors. (0 is success, 1 is a failed verification
    /// verdict; neither goes through an error.)
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Params(_)
            | LabError::Sampler(_)
            | LabError::Bounds(_)
            | LabError::InvalidArgument(_)
            | LabError::Capacity { .. } => 2,
            // Transform errors are data errors: the vectors, not the
            // parameters, were unusable.
            LabError::Transform(_)
            | LabError::EmptyInput
            | LabError::Ragged { .. }
            | LabError::Parse { .. }
            | LabError::NonFiniteInput { .. }
            | LabError::BadMatrixFile { .. }
            | LabError::Io(_) => 3,
        }
    }
}
