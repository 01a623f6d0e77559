//! Dense matrix kernel: scalar abstraction, matrices, factorizations,
//! eigenvalues and the Kronecker/vec machinery.

mod ddouble;
mod eigen;
mod linalg;
mod matrix;
mod scalar;

pub use ddouble::DoubleDouble;
pub use eigen::{eigenvalues, norm_2, spectral_radius, symmetric_eigenvalues, MAX_EIG_DIM};
pub use linalg::{
    cholesky, cholesky_default, default_pivot_tol, determinant, inverse, kron, solve_linear,
    solve_lower, solve_lower_transpose, unvec, vec_of, Ldlt, PIVOT_RTOL, SYMMETRY_RTOL,
};
pub use matrix::Matrix;
pub use scalar::{scaled_tol, Scalar};

/// Complex number used for eigenvalues and unit-circle points.
pub type ComplexPair = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite: pivot {pivot_index} = {pivot_value:e}")]
    NotPositiveDefinite { pivot_index: usize, pivot_value: f64 },
    #[error("pivot {pivot_index} has no square root in this scalar type")]
    NotRepresentable { pivot_index: usize },
    #[error("linear system is singular at pivot {pivot_index}")]
    SingularSystem { pivot_index: usize },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
}
