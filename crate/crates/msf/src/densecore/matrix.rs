use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::Scalar;
use super::LinalgError;

/// Dense row-major matrix over a [`Scalar`].
///
/// Arithmetic operators panic on shape mismatch; the fallible
/// constructors and kernels return [`LinalgError`] instead.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.finite()) {
            return Err(LinalgError::NonFinite { row: pos / cols.max(1), col: pos % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nr * nc);
        for r in rows {
            let r = r.as_ref();
            if r.len() != nc {
                return Err(LinalgError::DimensionMismatch { expected: (nr, nc), found: (nr, r.len()) });
            }
            data.extend_from_slice(r);
        }
        Self::new(nr, nc, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_diag(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let conv: Vec<Vec<T>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&v| T::from_f64(v)).collect()).collect();
        Self::from_rows(&conv)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square(), "symmetrize needs a square matrix");
        let half = T::one() / (T::one() + T::one());
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self[(i, i)].clone()
            } else {
                (self[(i, j)].clone() + self[(j, i)].clone()) * half.clone()
            }
        })
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<T>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Frobenius norm, accumulated in `f64`.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs_f64()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)].clone() - self[(j, i)].clone()).abs_f64());
            }
        }
        worst
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].abs_f64() <= tol))
    }

    /// Matrix product with shape checking.
    pub fn try_mul(&self, o: &Matrix<T>) -> Result<Self, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.cols, o.cols),
                found: o.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = a.clone() * o.data[k * o.cols + j].clone();
                    let slot = &mut out.data[i * o.cols + j];
                    *slot = slot.clone() + v;
                }
            }
        }
        Ok(out)
    }

    /// `self · oᵀ` without forming the transpose.
    pub fn mul_transpose(&self, o: &Matrix<T>) -> Self {
        assert_eq!(self.cols, o.cols, "mul_transpose shape mismatch");
        Self::from_fn(self.rows, o.rows, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * o[(j, k)].clone();
            }
            acc
        })
    }

    /// `selfᵀ · o` without forming the transpose.
    pub fn transpose_mul(&self, o: &Matrix<T>) -> Self {
        assert_eq!(self.rows, o.rows, "transpose_mul shape mismatch");
        Self::from_fn(self.cols, o.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.rows {
                acc = acc + self[(k, i)].clone() * o[(k, j)].clone();
            }
            acc
        })
    }

    fn zip(&self, o: &Matrix<T>, f: impl Fn(&T, &T) -> T, what: &str) -> Self {
        assert_eq!(self.shape(), o.shape(), "{what}: shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, o: &Matrix<T>) -> Matrix<T> {
        self.zip(o, |a, b| a.clone() + b.clone(), "add")
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, o: &Matrix<T>) -> Matrix<T> {
        self.zip(o, |a, b| a.clone() - b.clone(), "sub")
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, o: &Matrix<T>) -> Matrix<T> {
        self.try_mul(o).expect("matrix product shape mismatch")
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|v| -v.clone())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}
