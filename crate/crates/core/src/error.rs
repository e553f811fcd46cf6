use alloc::string::String;

use crate::Matrix;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric: |A[{i}][{j}] - A[{j}][{i}]| = {gap:e}")]
    Asymmetric { i: usize, j: usize, gap: f64 },

    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),

    #[error("invalid scenario configuration: {0}")]
    InvalidConfig(String),

    #[error("inner gradient descent did not converge in {iters} iterations (last step {last_step:e})")]
    InnerNotConverged {
        iters: usize,
        last_step: f64,
        alpha: f64,
        m: Matrix,
    },

    #[error("no grid cell satisfies rank = {k_hat} and {lo} <= |S| <= {hi}; adjust the gamma/delta grid ranges and search again")]
    EmptySelection { k_hat: usize, lo: f64, hi: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}
