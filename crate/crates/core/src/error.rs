use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty matrix or vector")]
    Empty,

    #[error("invalid tolerance: abs={abs}, rel={rel}")]
    InvalidTolerance { abs: f64, rel: f64 },

    #[error("matrix is not Hermitian: |M - M^H| = {deviation:e} at ({row}, {col})")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("matrix is singular: smallest singular value {sigma_min:e}")]
    Singular { sigma_min: f64 },

    #[error("condition number {condition:e} exceeds cap {cap:e}")]
    IllConditioned { condition: f64, cap: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate representation: kernel of {operator} has dimension {dim}, expected 1")]
    DegenerateRepresentation { operator: &'static str, dim: usize },

    #[error("seed vector of {operator} is not a k-eigenvector with eigenvalue 1 (residual {residual:e})")]
    SeedNotInProjector { operator: &'static str, residual: f64 },

    #[error("broken chain: ladder step {step} produced a vanishing vector (norm {norm:e})")]
    BrokenChain { step: usize, norm: f64 },

    #[error("chain did not terminate: last vector is not annihilated (residual {residual:e})")]
    ChainNotTerminated { residual: f64 },

    #[error("non-diagonalizable pairing: <psi_top, phi_top> = {overlap:e}")]
    NonDiagonalizablePairing { overlap: f64 },

    #[error("families are not biorthonormal: max |<psi_i, phi_j> - delta_ij| = {residual:e}")]
    NotBiorthonormal { residual: f64 },

    #[error("mu != nu convention violated upstream: |c^H - S^1/2 b S^-1/2| = {residual:e}")]
    ConventionViolated { residual: f64 },

    #[error("exceptional point: matrix is not diagonalizable ({0})")]
    ExceptionalPoint(String),

    #[error("{stage}: invariant check failed ({})", .report.first_failure().map(|c| c.name.as_str()).unwrap_or("?"))]
    CheckFailed {
        stage: &'static str,
        report: Box<ValidationReport>,
    },
}
