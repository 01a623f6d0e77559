//! Factorizations, linear solves and the Kronecker/vec machinery.

use std::cmp::Ordering;

use super::matrix::Matrix;
use super::scalar::{scaled_tol, Scalar};
use super::LinalgError;

/// Relative asymmetry accepted by the symmetric factorizations (for `f64`).
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// Default pivot threshold relative to the largest diagonal entry (for `f64`).
pub const PIVOT_RTOL: f64 = 1e-14;

fn require_square<T: Scalar>(a: &Matrix<T>) -> Result<usize, LinalgError> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() })
    }
}

fn checked_symmetric<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    require_square(a)?;
    let asym = a.asymmetry();
    let tol = scaled_tol::<T>(SYMMETRY_RTOL) * a.norm_fro();
    if asym > tol && !(T::is_exact() && asym == 0.0) {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    if T::is_exact() {
        // exact inputs must be exactly symmetric
        for i in 0..a.rows() {
            for j in 0..i {
                if a[(i, j)] != a[(j, i)] {
                    return Err(LinalgError::NotSymmetric { asymmetry: asym });
                }
            }
        }
        Ok(a.clone())
    } else {
        Ok(a.symmetrize())
    }
}

/// Default pivot tolerance: `1e-14 · max diagonal`, scaled to the precision of `T`.
pub fn default_pivot_tol<T: Scalar>(a: &Matrix<T>) -> f64 {
    let dmax = (0..a.rows().min(a.cols())).map(|i| a[(i, i)].abs_f64()).fold(0.0, f64::max);
    if T::is_exact() {
        0.0
    } else {
        scaled_tol::<T>(PIVOT_RTOL) * dmax
    }
}

fn check_pivot<T: Scalar>(d: &T, index: usize, pivot_tol: f64) -> Result<(), LinalgError> {
    if d.sign() != Ordering::Greater || d.to_f64() <= pivot_tol {
        return Err(LinalgError::NotPositiveDefinite { pivot_index: index, pivot_value: d.to_f64() });
    }
    Ok(())
}

/// Cholesky factor `L` with `A = L·Lᵀ`.
///
/// The input is symmetrized first. A pivot `≤ pivot_tol` (or not positive
/// in exact arithmetic) reports [`LinalgError::NotPositiveDefinite`]; a
/// pivot without a square root in `T` reports [`LinalgError::NotRepresentable`].
pub fn cholesky<T: Scalar>(a: &Matrix<T>, pivot_tol: f64) -> Result<Matrix<T>, LinalgError> {
    let a = checked_symmetric(a)?;
    let n = a.rows();
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].clone();
        for k in 0..j {
            d = d - l[(j, k)].clone() * l[(j, k)].clone();
        }
        check_pivot(&d, j, pivot_tol)?;
        let ljj = d.try_sqrt().ok_or(LinalgError::NotRepresentable { pivot_index: j })?;
        for i in j + 1..n {
            let mut s = a[(i, j)].clone();
            for k in 0..j {
                s = s - l[(i, k)].clone() * l[(j, k)].clone();
            }
            l[(i, j)] = s / ljj.clone();
        }
        l[(j, j)] = ljj;
    }
    Ok(l)
}

/// Cholesky with [`default_pivot_tol`].
pub fn cholesky_default<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    cholesky(a, default_pivot_tol(a))
}

/// Square-root-free symmetric factorization `A = L·D·Lᵀ` with unit lower `L`.
#[derive(Clone, Debug)]
pub struct Ldlt<T> {
    pub l: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> Ldlt<T> {
    /// Factor a symmetric positive definite matrix; pivots follow the same
    /// rules as [`cholesky`] applied to `D`.
    pub fn factor(a: &Matrix<T>, pivot_tol: f64) -> Result<Self, LinalgError> {
        let a = checked_symmetric(a)?;
        let n = a.rows();
        let mut l = Matrix::<T>::identity(n);
        let mut d: Vec<T> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = a[(j, j)].clone();
            for k in 0..j {
                dj = dj - l[(j, k)].clone() * l[(j, k)].clone() * d[k].clone();
            }
            check_pivot(&dj, j, pivot_tol)?;
            for i in j + 1..n {
                let mut s = a[(i, j)].clone();
                for k in 0..j {
                    s = s - l[(i, k)].clone() * l[(j, k)].clone() * d[k].clone();
                }
                l[(i, j)] = s / dj.clone();
            }
            d.push(dj);
        }
        Ok(Self { l, d })
    }

    pub fn min_pivot(&self) -> f64 {
        self.d.iter().map(|v| v.to_f64()).fold(f64::INFINITY, f64::min)
    }

    /// Solve `A·Y = B`.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.d.len();
        assert_eq!(b.rows(), n, "ldlt solve shape mismatch");
        let mut y = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = y[(i, c)].clone();
                for k in 0..i {
                    s = s - self.l[(i, k)].clone() * y[(k, c)].clone();
                }
                y[(i, c)] = s;
            }
            for i in 0..n {
                y[(i, c)] = y[(i, c)].clone() / self.d[i].clone();
            }
            for i in (0..n).rev() {
                let mut s = y[(i, c)].clone();
                for k in i + 1..n {
                    s = s - self.l[(k, i)].clone() * y[(k, c)].clone();
                }
                y[(i, c)] = s;
            }
        }
        y
    }

    /// Cholesky factor `L·√D`, if every pivot has a square root in `T`.
    pub fn cholesky_factor(&self) -> Option<Matrix<T>> {
        let roots: Option<Vec<T>> = self.d.iter().map(|v| v.try_sqrt()).collect();
        let roots = roots?;
        let n = roots.len();
        Some(Matrix::from_fn(n, n, |i, j| {
            if j > i {
                T::zero()
            } else {
                self.l[(i, j)].clone() * roots[j].clone()
            }
        }))
    }
}

/// Solve `L·Y = B` for lower-triangular `L`.
pub fn solve_lower<T: Scalar>(l: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let n = require_square(l)?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch { expected: (n, b.cols()), found: b.shape() });
    }
    let mut y = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            if l[(i, i)].is_zero() {
                return Err(LinalgError::SingularSystem { pivot_index: i });
            }
            let mut s = y[(i, c)].clone();
            for k in 0..i {
                s = s - l[(i, k)].clone() * y[(k, c)].clone();
            }
            y[(i, c)] = s / l[(i, i)].clone();
        }
    }
    Ok(y)
}

/// Solve `Lᵀ·Y = B` for lower-triangular `L`.
pub fn solve_lower_transpose<T: Scalar>(
    l: &Matrix<T>,
    b: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    let n = require_square(l)?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch { expected: (n, b.cols()), found: b.shape() });
    }
    let mut y = b.clone();
    for c in 0..b.cols() {
        for i in (0..n).rev() {
            if l[(i, i)].is_zero() {
                return Err(LinalgError::SingularSystem { pivot_index: i });
            }
            let mut s = y[(i, c)].clone();
            for k in i + 1..n {
                s = s - l[(k, i)].clone() * y[(k, c)].clone();
            }
            y[(i, c)] = s / l[(i, i)].clone();
        }
    }
    Ok(y)
}

/// Gaussian elimination with partial pivoting, in place on `a` and `b`.
/// Returns the sign of the row permutation.
fn eliminate<T: Scalar>(a: &mut Matrix<T>, b: &mut Matrix<T>) -> Result<bool, LinalgError> {
    let n = a.rows();
    let singular_tol = if T::is_exact() { 0.0 } else { n as f64 * T::EPSILON * a.max_abs() };
    let mut odd = false;
    for k in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for i in k..n {
            let v = &a[(i, k)];
            if v.is_zero() {
                continue;
            }
            let mag = v.abs_f64();
            if best.map_or(true, |(_, m)| mag > m) {
                best = Some((i, mag));
            }
        }
        let (p, mag) = best.ok_or(LinalgError::SingularSystem { pivot_index: k })?;
        if !T::is_exact() && mag <= singular_tol {
            return Err(LinalgError::SingularSystem { pivot_index: k });
        }
        if p != k {
            odd = !odd;
            for j in 0..n {
                let t = a[(k, j)].clone();
                a[(k, j)] = a[(p, j)].clone();
                a[(p, j)] = t;
            }
            for j in 0..b.cols() {
                let t = b[(k, j)].clone();
                b[(k, j)] = b[(p, j)].clone();
                b[(p, j)] = t;
            }
        }
        let piv = a[(k, k)].clone();
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = a[(i, k)].clone() / piv.clone();
            for j in k..n {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
            }
            for j in 0..b.cols() {
                b[(i, j)] = b[(i, j)].clone() - f.clone() * b[(k, j)].clone();
            }
        }
    }
    Ok(odd)
}

/// Solve `A·Y = B` by pivoted elimination.
///
/// In floating point a pivot with magnitude `≤ n·ε·max|A|` is treated as
/// zero; exact types fail only on an exactly zero column.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let n = require_square(a)?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch { expected: (n, b.cols()), found: b.shape() });
    }
    let mut u = a.clone();
    let mut y = b.clone();
    eliminate(&mut u, &mut y)?;
    for c in 0..y.cols() {
        for i in (0..n).rev() {
            let mut s = y[(i, c)].clone();
            for k in i + 1..n {
                s = s - u[(i, k)].clone() * y[(k, c)].clone();
            }
            y[(i, c)] = s / u[(i, i)].clone();
        }
    }
    Ok(y)
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    solve_linear(a, &Matrix::identity(a.rows()))
}

/// Determinant by elimination; zero when elimination finds a zero column.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> Result<T, LinalgError> {
    let n = require_square(a)?;
    let mut u = a.clone();
    let mut dummy = Matrix::<T>::zeros(n, 0);
    let odd = match eliminate(&mut u, &mut dummy) {
        Ok(odd) => odd,
        Err(LinalgError::SingularSystem { .. }) if T::is_exact() => return Ok(T::zero()),
        Err(e) => return Err(e),
    };
    let det = (0..n).fold(T::one(), |acc, i| acc * u[(i, i)].clone());
    Ok(if odd { -det } else { det })
}

/// Kronecker product: block `(i, j)` of the result is `a_ij · B`.
pub fn kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (p, q) = a.shape();
    let (r, s) = b.shape();
    Matrix::from_fn(p * r, q * s, |i, j| a[(i / r, j / s)].clone() * b[(i % r, j % s)].clone())
}

/// Column-stacking vectorization as an `(rows·cols) × 1` matrix.
pub fn vec_of<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let (r, c) = a.shape();
    Matrix::from_fn(r * c, 1, |k, _| a[(k % r, k / r)].clone())
}

/// Inverse of [`vec_of`].
pub fn unvec<T: Scalar>(v: &Matrix<T>, rows: usize, cols: usize) -> Result<Matrix<T>, LinalgError> {
    let len = v.rows() * v.cols();
    if len != rows * cols {
        return Err(LinalgError::DimensionMismatch { expected: (rows, cols), found: v.shape() });
    }
    let flat = v.as_slice();
    Ok(Matrix::from_fn(rows, cols, |i, j| flat[j * rows + i].clone()))
}
