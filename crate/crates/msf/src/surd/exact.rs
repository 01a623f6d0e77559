//! Exact solving and verification over surd fields.

use std::cmp::Ordering;

use num_traits::Zero;

use super::{SurdElem, SurdError, SurdMatrix};
use crate::densecore::{cholesky, inverse, LinalgError, Matrix, Scalar};
use crate::matpoly::MatLaurentPoly;

/// Exact Cholesky factor `L` with `L·Lᵀ = X`.
pub fn exact_cholesky(x: &SurdMatrix) -> Result<SurdMatrix, SurdError> {
    cholesky(x, 0.0).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { pivot_index, .. } => SurdError::NotPositive { pivot_index },
        LinalgError::NotRepresentable { pivot_index } => {
            SurdError::NotRepresentable(format!("square root of Cholesky pivot {pivot_index}"))
        }
        other => SurdError::Linalg(other),
    })
}

/// Exact inverse; an exactly singular matrix reports division by zero.
pub fn exact_inverse(x: &SurdMatrix) -> Result<SurdMatrix, SurdError> {
    inverse(x).map_err(|e| match e {
        LinalgError::SingularSystem { .. } => SurdError::DivisionByZero,
        other => SurdError::Linalg(other),
    })
}

/// Exact positive semidefiniteness test by symmetric elimination with
/// exact signs.
pub fn is_psd_exact<T: Scalar>(a: &Matrix<T>) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    let mut w = a.clone();
    for i in 0..n {
        for j in 0..i {
            if w[(i, j)] != w[(j, i)] {
                return false;
            }
        }
    }
    for k in 0..n {
        match w[(k, k)].sign() {
            Ordering::Less => return false,
            Ordering::Equal => {
                // a zero pivot forces a zero row in a semidefinite matrix
                if (k + 1..n).any(|j| !w[(k, j)].is_zero()) {
                    return false;
                }
                continue;
            }
            Ordering::Greater => {}
        }
        let piv = w[(k, k)].clone();
        for i in k + 1..n {
            if w[(i, k)].is_zero() {
                continue;
            }
            let f = w[(i, k)].clone() / piv.clone();
            for j in k..n {
                w[(i, j)] = w[(i, j)].clone() - f.clone() * w[(k, j)].clone();
            }
        }
    }
    true
}

/// Closed-form solution of the scalar equation `x = p0 − p1²/x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSolution {
    pub x: SurdElem,
    pub h0: SurdElem,
    pub h1: SurdElem,
}

/// Maximal solution `x = (p0 + √(p0² − 4p1²))/2` with `h0 = √x`, `h1 = p1/h0`.
pub fn exact_scalar_solve(p0: &SurdElem, p1: &SurdElem) -> Result<ScalarSolution, SurdError> {
    if p0.signum() != Ordering::Greater {
        return Err(SurdError::NotPositive { pivot_index: 0 });
    }
    let disc = &(p0 * p0) - &(&SurdElem::int(4) * &(p1 * p1));
    if disc.signum() == Ordering::Less {
        return Err(SurdError::NoRealFactorization);
    }
    let root = disc.sqrt()?;
    let x = &(p0 + &root) * &SurdElem::frac(1, 2);
    let h0 = x.sqrt()?;
    let h1 = p1 * &h0.inv()?;
    Ok(ScalarSolution { x, h0, h1 })
}

/// Outcome of [`exact_verify`]; every flag is an exact identity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VerifyReport {
    /// `X − P0 + P1ᵀX⁻¹P1 = 0`
    pub nme_ok: bool,
    /// `P0 = H0H0ᵀ + H1H1ᵀ`
    pub product_ok: bool,
    /// `P1 = H0H1ᵀ`
    pub cross_ok: bool,
    /// `H0` lower-triangular, positive diagonal, `H0H0ᵀ = X`
    pub cholesky_ok: bool,
}

impl VerifyReport {
    pub fn all(&self) -> bool {
        self.nme_ok && self.product_ok && self.cross_ok && self.cholesky_ok
    }

    /// Names of the identities that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.nme_ok, "nme"),
            (self.product_ok, "product"),
            (self.cross_ok, "cross"),
            (self.cholesky_ok, "cholesky"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

fn is_zero_matrix(a: &SurdMatrix) -> bool {
    a.as_slice().iter().all(Zero::is_zero)
}

/// Exact check of a candidate solution. For degree `m > 1` the problem is
/// block-embedded first and `X`, `H0`, `H1` are taken in embedded form.
pub fn exact_verify(
    p: &MatLaurentPoly<SurdElem>,
    x: &SurdMatrix,
    h0: &SurdMatrix,
    h1: &SurdMatrix,
) -> Result<VerifyReport, SurdError> {
    let (p0, p1) = p.block_embed().map_err(|e| SurdError::DimensionMismatch(e.to_string()))?;
    let d = p0.rows();
    for (name, m) in [("X", x), ("H0", h0), ("H1", h1)] {
        if m.shape() != (d, d) {
            return Err(SurdError::DimensionMismatch(format!(
                "{name} is {}x{}, expected {d}x{d}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let xinv = exact_inverse(x)?;
    let f = &(x - &p0) + &(&p1.transpose() * &(&xinv * &p1));
    let nme_ok = is_zero_matrix(&f);
    let product_ok = is_zero_matrix(&(&(&p0 - &h0.mul_transpose(h0)) - &h1.mul_transpose(h1)));
    let cross_ok = is_zero_matrix(&(&p1 - &h0.mul_transpose(h1)));
    let lower = (0..d).all(|i| (i + 1..d).all(|j| h0[(i, j)].is_zero()));
    let pos_diag = (0..d).all(|i| h0[(i, i)].signum() == Ordering::Greater);
    let cholesky_ok = lower && pos_diag && is_zero_matrix(&(x - &h0.mul_transpose(h0)));
    Ok(VerifyReport { nme_ok, product_ok, cross_ok, cholesky_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::parse_surd;

    fn m(rows: &[&[&str]]) -> SurdMatrix {
        let rows: Vec<Vec<SurdElem>> =
            rows.iter().map(|r| r.iter().map(|t| parse_surd(t).unwrap()).collect()).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn cholesky_closed_forms() {
        let x6 = m(&[&["1/2", "s3/4"], &["s3/4", "1/2"]]);
        let h6 = m(&[&["s2/2", "0"], &["s6/4", "s2/4"]]);
        assert_eq!(exact_cholesky(&x6).unwrap(), h6);

        let x5 = m(&[&["1/2", "(s7+1)/8"], &["(s7+1)/8", "1/2"]]);
        let h5 = m(&[&["s2/2", "0"], &["s2*(s7+1)/8", "s2*(s7-1)/8"]]);
        assert_eq!(exact_cholesky(&x5).unwrap(), h5);

        let d = m(&[&["4", "0"], &["0", "9"]]);
        assert_eq!(exact_cholesky(&d).unwrap(), m(&[&["2", "0"], &["0", "3"]]));
    }

    #[test]
    fn cholesky_errors() {
        let neg = m(&[&["1", "2"], &["2", "1"]]);
        assert_eq!(exact_cholesky(&neg), Err(SurdError::NotPositive { pivot_index: 1 }));
        let nested = m(&[&["1+s2"]]);
        assert!(matches!(exact_cholesky(&nested), Err(SurdError::NotRepresentable(_))));
    }

    #[test]
    fn scalar_solutions() {
        let s = exact_scalar_solve(&SurdElem::int(2), &SurdElem::int(1)).unwrap();
        assert_eq!((s.x, s.h0, s.h1), (SurdElem::int(1), SurdElem::int(1), SurdElem::int(1)));

        let s = exact_scalar_solve(&SurdElem::int(1), &SurdElem::frac(1, 2)).unwrap();
        assert_eq!(s.x, SurdElem::frac(1, 2));
        assert_eq!(s.h0, parse_surd("s2/2").unwrap());
        assert_eq!(s.h1, parse_surd("s2/2").unwrap());

        let s = exact_scalar_solve(&SurdElem::int(5), &SurdElem::int(2)).unwrap();
        assert_eq!((s.x, s.h0, s.h1), (SurdElem::int(4), SurdElem::int(2), SurdElem::int(1)));

        assert_eq!(
            exact_scalar_solve(&SurdElem::int(1), &SurdElem::int(1)),
            Err(SurdError::NoRealFactorization)
        );
        assert_eq!(
            exact_scalar_solve(&SurdElem::int(-1), &SurdElem::int(0)),
            Err(SurdError::NotPositive { pivot_index: 0 })
        );
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd_exact(&m(&[&["1", "1"], &["1", "1"]])));
        assert!(is_psd_exact(&m(&[&["0", "0"], &["0", "2"]])));
        assert!(!is_psd_exact(&m(&[&["0", "1"], &["1", "2"]])));
        assert!(!is_psd_exact(&m(&[&["1", "s2"], &["s2", "1"]])));
        assert!(is_psd_exact(&m(&[&["s2", "1"], &["1", "s2/2"]])));
    }

    #[test]
    fn verify_flags_detect_tampering() {
        let p0 = m(&[&["6", "22"], &["22", "84"]]);
        let p1 = m(&[&["2", "7"], &["11", "38"]]);
        let p = MatLaurentPoly::from_one_sided(&p0, &p1).unwrap();
        let x = m(&[&["1", "5"], &["5", "26"]]);
        let h0 = m(&[&["1", "0"], &["5", "1"]]);
        let h1 = m(&[&["2", "1"], &["7", "3"]]);
        assert!(exact_verify(&p, &x, &h0, &h1).unwrap().all());

        let mut bad = h1.clone();
        bad[(0, 0)] = SurdElem::int(3);
        let r = exact_verify(&p, &x, &h0, &bad).unwrap();
        assert!(r.nme_ok && r.cholesky_ok && !r.product_ok && !r.cross_ok);
        assert_eq!(r.failures(), vec!["product", "cross"]);

        let singular = m(&[&["1", "1"], &["1", "1"]]);
        assert_eq!(exact_verify(&p, &singular, &h0, &h1), Err(SurdError::DivisionByZero));
    }
}
