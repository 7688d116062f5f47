//! Error types shared across the crate.

use thiserror::Error;

/// Which of the three fundamental diffusion-coefficient constraints failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionConstraint {
    /// (i): the momentum diffusion coefficient must be positive.
    PositiveDpp,
    /// (ii): the position diffusion coefficient must be positive.
    PositiveDqq,
    /// (iii): D_pp * D_qq - D_pq^2 >= lambda^2 / 4.
    GeneralizedUncertainty,
}

impl std::fmt::Display for DiffusionConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PositiveDpp => write!(f, "(i) D_pp > 0"),
            Self::PositiveDqq => write!(f, "(ii) D_qq > 0"),
            Self::GeneralizedUncertainty => {
                write!(f, "(iii) D_pp*D_qq - D_pq^2 >= lambda^2/4")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("q-phase bracket [{n}] = {value} is not positive; tau too large for this truncation")]
    NegativeBracket { n: usize, value: f64 },

    #[error("invalid deformation table: {0}")]
    InvalidTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("diffusion constraint {constraint} violated: {detail}")]
    ConstraintViolation {
        constraint: DiffusionConstraint,
        detail: String,
    },

    #[error("non-contractive environment: D2 = {d2} < lambda = {lambda}")]
    NonContractive { d2: f64, lambda: f64 },

    #[error("non-dissipative environment couplings: lambda = {lambda} <= 0")]
    NonDissipative { lambda: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {dim} exceeds the dense vectorization cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("integration step check failed: step-halving discrepancy {discrepancy:.3e} exceeds {tol:.3e}; reduce dt")]
    StepUnstable { discrepancy: f64, tol: f64 },

    #[error("integration diverged by t = {t}; reduce dt or enlarge the truncation")]
    Diverged { t: f64 },

    #[error("operation requires thermal environment coefficients (coth factor present)")]
    NotThermal,

    #[error("linear solve failed: {0}")]
    SingularMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
