use thiserror::Error;

use crate::sqrtpolar::PartitionMismatch;

/// Errors raised across the toolkit.
///
/// Variants that describe a broken theorem identity (`TheoremViolation`,
/// `RepresentationInconsistent`, `OracleMismatch`, ...) signal a numerical or
/// implementation defect rather than bad input.
#[derive(Debug, Error)]
pub enum KreinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid fundamental symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("basis is rank deficient (σ_min/σ_max = {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("empty vector family")]
    EmptyFamily,

    #[error("vector {index} is zero")]
    ZeroVector { index: usize },

    #[error("subspace is not uniformly definite with the requested sign")]
    NotDefinite,

    #[error("subspace is not maximal uniformly definite: {0}")]
    NotMaximalDefinite(String),

    #[error("subspace is not a graph over the requested half (coordinate block singular)")]
    NotGraph,

    #[error("angular operator is not a uniform contraction (‖K‖ = {norm})")]
    ContractViolation { norm: f64 },

    #[error("range and kernel are not complementary")]
    NotComplementary,

    #[error("not a J-frame: {0}")]
    NotJFrame(String),

    #[error("block representation inconsistent: {what} (residual {residual:.3e})")]
    RepresentationInconsistent { what: String, residual: f64 },

    #[error("{what}: implementation value {implementation} disagrees with oracle value {oracle}")]
    OracleMismatch {
        what: String,
        implementation: f64,
        oracle: f64,
    },

    #[error("theorem check failed: {what} (residual {residual:.3e} > tolerance {tolerance:.3e})")]
    TheoremViolation {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("operator is singular")]
    SingularOperator,

    #[error("λ = {re}{im:+}i lies in the spectrum of the diagonal block")]
    LambdaInBlockSpectrum { re: f64, im: f64 },

    #[error("eigenvalue {re}{im:+}i is not in the open right half-plane")]
    SpectrumNotInRightHalfPlane { re: f64, im: f64 },

    #[error("square-root recurrence broke down (|Rᵢᵢ + Rⱼⱼ| = {0:.3e})")]
    RecurrenceBreakdown(f64),

    #[error("contour passes within {distance:.3e} of the spectrum (limit {limit:.3e})")]
    ContourTooClose { distance: f64, limit: f64 },

    #[error("contour does not enclose eigenvalue {re}{im:+}i")]
    ContourDoesNotEnclose { re: f64, im: f64 },

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("cannot place a circular contour around the spectrum: {0}")]
    CannotEnclose(String),

    #[error("initial space N(T)^[⊥] is not regular")]
    NonRegularKernel,

    #[error("synthesis operators define different J-frame operators (relative gap {residual:.3e})")]
    OperatorMismatch { residual: f64 },

    #[error("realized sign partition does not match the prescribed one")]
    SignPartitionMismatch(Box<PartitionMismatch>),

    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),

    #[error("instance generation failed after {attempts} attempts")]
    GenerationExhausted { attempts: usize },

    #[error("eigenvalue solver did not converge")]
    EigenSolver,
}

pub type Result<T> = std::result::Result<T, KreinError>;
