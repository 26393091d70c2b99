use thiserror::Error;

/// Errors raised by the numeric and exact pipelines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch cut: z = {0} lies on [1, inf)")]
    BranchCut(String),

    #[error("precision budget violated: {0}")]
    Precision(String),

    #[error("P_{k}: coefficient denominator has prime factor {prime} > {bound}")]
    Smoothness { k: usize, prime: u64, bound: u64 },

    #[error("P_{k}(0): no smooth rational within {radius} of {value}")]
    Reconstruction {
        k: usize,
        value: String,
        radius: String,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ambiguous phase unwrap between k={k} and k={next}: difference {diff}")]
    Unwrap { k: usize, next: usize, diff: String },

    #[error("methods {first} and {second} disagree by {diff} (allowed {allowed})")]
    CrossCheck {
        first: String,
        second: String,
        diff: String,
        allowed: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
