use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square with dimension >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular (|det| ~ {det_estimate:e})")]
    SingularMatrix { det_estimate: f64 },

    #[error("matrix is not diagonalizable within tolerance (eigenvector condition {condition:e})")]
    NearDefective { condition: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("Dyson map is too ill-conditioned to certify its metric")]
    IllConditionedMap,

    #[error("operator is not quasi-Hermitian for the given metric (residual {residual:e})")]
    NotQuasiHermitian { residual: f64 },

    #[error("spectrum is not real: {eigenvalues:?}")]
    ComplexSpectrum { eigenvalues: Vec<Complex64> },

    #[error("dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("target metric lies outside the family (residual {residual:e})")]
    TargetOutsideFamily { residual: f64 },

    #[error("weight {index} is not positive ({value:e})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("LDU without pivoting fails at leading minor of order {minor}")]
    PivotFailure { minor: usize },

    #[error("split factors are inconsistent: {what} residual {residual:e}")]
    InconsistentSplit { what: &'static str, residual: f64 },

    #[error("interpolation parameter mu = {0} outside [0, 1]")]
    MuOutOfRange(f64),

    #[error("cost weights must be nonnegative (w_h = {w_h}, w_m = {w_m})")]
    NegativeCostWeight { w_h: f64, w_m: f64 },

    #[error("invalid time grid: t_max = {t_max}, dt = {dt}")]
    InvalidTimeGrid { t_max: f64, dt: f64 },
}
