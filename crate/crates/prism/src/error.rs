use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix is not symmetric within tolerance in {op}")]
    NotSymmetric { op: &'static str },

    #[error("matrix is not positive definite (failing pivot/eigenvalue index {index})")]
    NotPositiveDefinite { index: usize },

    #[error("matrix is numerically singular (eigenvalue index {index} below threshold)")]
    Singular { index: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace table too short: power {needed} requested but only {available} available")]
    MissingPower { needed: usize, available: usize },

    #[error("numerical instability detected at iteration {iteration}")]
    NumericalInstability { iteration: usize },

    #[error("matrix file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
