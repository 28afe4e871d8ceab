use thiserror::Error;

/// Everything that can go wrong while validating, constructing or decomposing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (normalized residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is singular to working precision (smallest eigenvalue {min_eigenvalue:.3e})")]
    Singular { min_eigenvalue: f64 },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("unitary completion impossible: dim N(A) = {kernel}, dim N(A*) = {cokernel}")]
    CompletionImpossible { kernel: usize, cokernel: usize },

    #[error("matrix is not idempotent (normalized residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("matrix is not a symmetry (residual {residual:.3e})")]
    NotSymmetry { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("P + P* - I is numerically singular (smallest singular value {sigma_min:.3e})")]
    NearSingular { sigma_min: f64 },

    #[error("rank routes disagree: {0}")]
    InconsistentRank(String),

    #[error("no such symmetry exists: dim N(P+P*) = {d_plus}, dim N(2I-P-P*) = {d_minus}")]
    NotExists { d_plus: usize, d_minus: usize },

    #[error("invalid parameter: {0}")]
    BadParam(String),

    #[error("not a member: {0}")]
    NotMember(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
