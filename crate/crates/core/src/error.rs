use thiserror::Error;

/// Errors raised by the decomposition machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator matrix is singular (|det| = {det:e})")]
    SingularGenerator { det: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("lattice enumeration would visit {count} coefficient vectors (cap {cap})")]
    EnumerationTooLarge { count: u128, cap: u64 },

    #[error("{op} supports dimension at most {max}, got {dim}")]
    UnsupportedDimension {
        op: &'static str,
        dim: usize,
        max: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {value} lies outside the domain [{lo}, {hi})")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("density has no sampler")]
    NoSampler,

    #[error("density declares no tail envelope, truncation cannot be certified")]
    NoTailBound,

    #[error("wrapped density vanishes at the conditioning point (p_pi = {value:e})")]
    ZeroWrappedMass { value: f64 },

    #[error("density integrates to {integral} instead of 1")]
    NonNormalized { integral: f64 },

    #[error("truncated probability mass {mass:e} is too large for a reliable entropy")]
    ExcessTruncation { mass: f64 },

    #[error("quantized variance {variance:e} is degenerate")]
    DegenerateVariance { variance: f64 },

    #[error("finite-difference step {step:e} is dominated by noise in entry ({i}, {j})")]
    StepTooSmall { step: f64, i: usize, j: usize },

    #[error("quadrature did not converge: error estimate {error:e} above target {target:e}")]
    QuadratureFailed { error: f64, target: f64 },

    #[error("mutual information {value:e} is negative beyond tolerance {tol:e}")]
    NegativeMutualInformation { value: f64, tol: f64 },

    #[error("quotient has {size} elements (cap {cap})")]
    QuotientTooLarge { size: u128, cap: u64 },

    #[error("subgroup index {ratio} is not an integer")]
    NonIntegerIndex { ratio: f64 },

    #[error("invalid quotient: {0}")]
    InvalidQuotient(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
