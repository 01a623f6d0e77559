//! Exact arithmetic over multi-quadratic fields `Q(√d₁, …, √d_k)`, the text
//! form for such constants, and exact solving and verification routines.

mod elem;
mod exact;
mod parse;

pub use elem::{SurdElem, SurdField};
pub use exact::{
    exact_cholesky, exact_inverse, exact_scalar_solve, exact_verify, is_psd_exact, ScalarSolution,
    VerifyReport,
};
pub use parse::parse_surd;

use crate::densecore::{LinalgError, Matrix};

/// Matrix with exact surd entries.
pub type SurdMatrix = Matrix<SurdElem>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurdError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("generator {0} is not square-free")]
    NotSquareFree(u64),
    #[error("pivot {pivot_index} is not positive")]
    NotPositive { pivot_index: usize },
    #[error("negative discriminant: no real spectral factor")]
    NoRealFactorization,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
