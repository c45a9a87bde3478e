use alloc::string::String;

/// Errors raised by the simulation kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dagger U - 1| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("trace must equal 1 (trace = {trace})")]
    TraceNotOne { trace: f64 },

    #[error("state is not positive semidefinite (smallest eigenvalue = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("weights must sum to 1 (sum = {sum})")]
    WeightsNotNormalized { sum: f64 },

    #[error("weight {index} is negative or not finite ({weight})")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("ensemble has no realizations")]
    EmptyEnsemble,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "realization {index} does not commute with the system Hamiltonian \
         (max |[H_lambda, H_S]| = {residual:e}, allowed {allowed:e})"
    )]
    NonCommuting {
        index: usize,
        residual: f64,
        allowed: f64,
    },

    #[error("ensemble mean is not zero (max |mean| = {residual:e}); center the ensemble first")]
    NonZeroMean { residual: f64 },

    #[error(
        "degenerate spectrum: levels {m} and {n} have gap {gap:e}; \
         the resolvent i/(E_n - E_m + i eps) diverges at eps = 0"
    )]
    DegenerateResolvent { m: usize, n: usize, gap: f64 },

    #[error("spectrum is fully degenerate; the level spacing is zero")]
    DegenerateSpectrum,

    #[error("generator kind mismatch: expected {expected}, problem is {found}")]
    GeneratorMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("combined dimension {dim} exceeds the limit of {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("non-finite state encountered at integration step {step}")]
    NonFiniteState { step: usize },

    #[error("time grids differ at sample {index}")]
    GridMismatch { index: usize },

    #[error("time series is malformed: {0}")]
    InvalidSeries(&'static str),
}

impl Error {
    /// True for failures of the numerics (as opposed to rejected input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFiniteState { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
