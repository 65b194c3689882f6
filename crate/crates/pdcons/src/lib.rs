//! Distributed primal-dual consensus optimization over agent networks.
//!
//! A network of `n` agents cooperatively minimizes `Σ f_i(x)` by keeping local
//! copies of the decision variable and penalizing disagreement across edges.
//! The main algorithm is an augmented-Lagrangian primal-dual iteration that
//! performs a configurable number of primal updates per outer iteration while
//! evaluating each local gradient only once. The crate ships:
//!
//! - [`graph`]: network topologies, the edge-node incidence matrix `A`, the
//!   augmentation matrix `B`, and the spectral quantities the theory needs;
//! - [`objective`]: per-agent smooth strongly convex objective bundles
//!   (quadratic and regularized logistic) plus LIBSVM dataset ingestion;
//! - [`engine`]: two interchangeable executions of the algorithm — an
//!   agent-wise message-passing engine and a dense compact-form engine — and
//!   the `C`/`M`/`N` matrix calculus behind the rate analysis;
//! - [`certify`]: admissible stepsize bounds, the guaranteed linear-rate
//!   certificate, and numerical monitors for the supporting inequalities;
//! - [`baselines`]: EXTRA-style configuration, gradient tracking, NEAR-DGD+,
//!   plain distributed gradient descent, and the centralized method of
//!   multipliers benchmark.
//!
//! All numerical code is generic over the scalar type through [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases below fix the common double-precision choice.

pub mod baselines;
pub mod certify;
pub mod engine;
pub mod graph;
pub mod linalg;
pub mod objective;
pub mod scalar;

mod error;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision dense matrix.
pub type Mat64 = linalg::Mat<f64>;
/// Single-precision dense matrix.
pub type Mat32 = linalg::Mat<f32>;
/// Double-precision objective bundle.
pub type Objective64 = objective::Objective<f64>;
/// Double-precision dataset.
pub type Dataset64 = objective::Dataset<f64>;
/// Double-precision algorithm parameters.
pub type PdConfig64 = engine::PdConfig<f64>;
/// Double-precision run state.
pub type RunState64 = engine::RunState<f64>;
/// Double-precision trajectory record.
pub type Trajectory64 = engine::Trajectory<f64>;
/// Double-precision rate certificate.
pub type RateCertificate64 = certify::RateCertificate<f64>;
