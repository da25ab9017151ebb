use thiserror::Error;

/// Errors raised by the estimation pipeline and its linear algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not anti-hermitian (deviation {0:e})")]
    NotAntiHermitian(f64),

    #[error("matrix is not a reflection (deviation {0:e})")]
    NotReflection(f64),

    #[error("eigendecomposition did not converge")]
    Decomposition,

    #[error("eigenphase {phase} lies within {guard:e} of the branch cut at pi")]
    BranchCut { phase: f64, guard: f64 },

    #[error("matrix is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),

    #[error("query budget exceeded: {used} used, {requested} requested, budget {budget}")]
    BudgetExceeded { used: u64, requested: u64, budget: u64 },

    #[error("phase set is empty")]
    EmptyPhaseSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
