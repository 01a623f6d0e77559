//! Spectral factorization of para-Hermitian matrix Laurent polynomials
//! through the nonlinear matrix equation `X = P0 − P1ᵀX⁻¹P1`.

pub mod corpus;
pub mod densecore;
pub mod diagnostics;
pub mod matpoly;
pub mod nme;
pub mod surd;

pub use densecore::{ComplexPair, DoubleDouble, LinalgError, Matrix, Scalar};
pub use surd::{SurdElem, SurdMatrix};

pub type DenseMatrix = Matrix<f64>;
pub type DdMatrix = Matrix<DoubleDouble>;
pub type RationalMatrix = Matrix<num_rational::BigRational>;
