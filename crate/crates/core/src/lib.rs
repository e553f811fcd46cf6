//! Low-rank plus sparse logistic models for undirected networks.
//!
//! An observed symmetric 0/1 adjacency matrix `X` is modelled as
//!
//! ```text
//! P(X_ij = 1) = sigmoid(alpha + L_ij + S_ij),   i < j
//! ```
//!
//! where `alpha` is a global intercept, `L` is a centered positive
//! semidefinite low-rank matrix capturing shared latent topics, and `S` is a
//! sparse symmetric matrix capturing ad-hoc links. Parameters are estimated by
//! minimising the negative log-likelihood (scaled by `1/n`) plus an L1 penalty
//! on `S` and a nuclear-norm penalty on `L`, using a three-block ADMM.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, preprocessing
//! and the command line live in the companion `lsnet` crate.
//!
//! Modules:
//!
//! * [`model`]: likelihood, objective, gradients and theory diagnostics.
//! * [`admm`]: the proximal operators and the ADMM solver.
//! * [`synth`]: the synthetic scenario generator.
//! * [`selection`]: scree analysis, grid search, tuning rules and metrics.
//! * [`membership`]: spectral embedding, k-means and principal projection.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod admm;
pub mod error;
pub mod linalg;
pub mod matching;
pub mod membership;
pub mod model;
pub mod selection;
pub mod synth;

pub use admm::{fit, AdmmState, FitResult};
pub use error::{Error, Result};
pub use model::{AdjacencyMatrix, DiagnosticConfig, Hyperparams, ModelParams};

/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
