//! Sparse sign-consistent Johnson-Lindenstrauss transform with explicit constants.
//!
//! The random matrix A maps the unit sphere in R^m into R^d while preserving
//! squared norms up to a factor 1 ± eps with probability at least 1 - delta.
//! Each column of A holds exactly `s` nonzero entries on a uniformly chosen
//! support, and all of them share one Rademacher sign, so
//!
//! ```text
//! A[i][j] = eta[i][j] * sigma[j] / sqrt(s)
//! ```
//!
//! with `eta[.][j]` the indicator of the column support and `sigma[j] = +-1`.
//! Sign consistency along columns is what distinguishes this construction from
//! the classical sparse JL transforms with i.i.d. entry signs; it arises in
//! models of neural connectivity where a single neuron is either excitatory or
//! inhibitory, never both.
//!
//! The crate provides
//!
//! * [`params`]: the translation of a distortion target `(eps, delta)` into
//!   explicit matrix dimensions, with the constants spelled out rather than
//!   hidden in big-O notation,
//! * [`sampler`]: seeded, reproducible sampling of the matrix in a compact
//!   support-plus-sign representation,
//! * [`transform`]: applying the matrix to vectors and evaluating the
//!   distortion quadratic form that drives the analysis,
//! * [`bounds`]: closed-form evaluators for the concentration bounds
//!   (sub-gaussian, sub-gamma, Hanson-Wright type) that the Monte Carlo lab
//!   checks against.
//!
//! The crate is `no_std` (with `alloc`) so the transform can run in embedded
//! or kernel-adjacent environments; everything that needs an operating system
//! lives in the companion lab crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod params;
pub mod sampler;
pub mod transform;

pub use bounds::{
    hw_tail_bound, quadform_mgf_bound, quadform_subgamma_params, subgamma_tail_bound,
    subgauss_square_mgf_bound, subgaussian_tail_bound, variance_proxy, BoundsError,
    SubGammaParams, VarianceProxy,
};
pub use params::{compute_parameters, validate_params, JlParams, ParamError, Violation};
pub use sampler::{sample_matrix, sample_support, SamplerError, SeedSpec, SscMatrix};
pub use transform::{Histogram, PairwiseDistortion, TransformError, VectorBatch};
