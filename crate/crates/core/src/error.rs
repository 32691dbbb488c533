use thiserror::Error;

use crate::fock::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation size {0} is too small (need at least {1})")]
    TruncationTooSmall(usize, usize),

    #[error("negative index {0}")]
    NegativeIndex(i64),

    #[error("index {index} out of range (available: {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("sample length {found} does not match grid length {expected}")]
    SampleLength { expected: usize, found: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("basis mismatch: {0} vs {1}")]
    BasisMismatch(BasisTag, BasisTag),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not anti-Hermitian (deviation {0:e})")]
    NotAntiHermitian(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("spectral function undefined at eigenvalue {0}")]
    SpectralFunctionUndefined(f64),

    #[error("|lambda| = {0} lies inside the forbidden band |lambda| <= sqrt(pi)/2")]
    ForbiddenLambda(f64),

    #[error("inadmissible weights: {0}")]
    InadmissibleWeights(String),

    #[error("coefficient recursion breaks down at n = {0} (c_n = 0 with w_(n+1) > 0)")]
    RecursionBreakdown(usize),

    #[error("partial sum W_{index} vanishes; d_n is only defined for n < {index}")]
    VanishingPartialSum { index: usize, valid_prefix: Vec<f64> },

    #[error("argument {argument} lies at or beyond the radius of convergence {radius}")]
    BeyondRadius { argument: f64, radius: f64 },

    #[error("truncation tail {tail:e} exceeds the allowed {allowed:e}")]
    TruncationTail { tail: f64, allowed: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series error: {0}")]
    Series(String),
}
