//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by code construction, decoding, and serialization.
#[derive(Debug, Error)]
pub enum Error {
    /// A monomial or set was used with an incompatible variable count.
    #[error("variable count mismatch: expected {expected}, got {got}")]
    VariableMismatch { expected: usize, got: usize },

    /// Variable count outside the supported range `1..=24`.
    #[error("unsupported variable count {0} (supported: 1..=24)")]
    InvalidVariableCount(usize),

    /// A channel parameter outside its valid range.
    #[error("invalid channel parameter {value} for {what}")]
    InvalidParameter { what: &'static str, value: f64 },

    /// A vector length does not match the code or table length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// An operation required a decreasing monomial set and got one that is not.
    #[error("monomial set is not decreasing")]
    NotDecreasing,

    /// A decoder received a non-finite log-likelihood ratio.
    #[error("non-finite LLR input at position {0}")]
    NonFiniteLlr(usize),

    /// No code satisfying the requested target exists on the given table.
    #[error("no feasible code: {0}")]
    Infeasible(String),

    /// The punctured columns do not have full rank in the dual generator.
    #[error("puncture columns have rank {rank}, need {needed}")]
    PunctureRank { needed: usize, rank: usize },

    /// A constructed matrix failed triorthogonality verification.
    #[error("triorthogonality verification failed: {0}")]
    Verification(String),

    /// A serialized artifact is malformed.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
