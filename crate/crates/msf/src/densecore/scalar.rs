//! Scalar abstraction shared by every numeric routine in the crate.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element usable by the dense kernels and the solvers.
///
/// Floating types report their unit roundoff through [`Scalar::EPSILON`];
/// exact types report zero and must decide signs exactly.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Machine epsilon of the representation, `0.0` for exact arithmetic.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    /// Sign relative to zero. Exact for exact types.
    fn sign(&self) -> Ordering;

    /// Square root when it exists in the representation.
    fn try_sqrt(&self) -> Option<Self>;

    fn finite(&self) -> bool {
        true
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    fn is_exact() -> bool {
        Self::EPSILON == 0.0
    }
}

/// Scale a tolerance calibrated for `f64` to the precision of `T`.
///
/// Exact types get the smallest positive double so that strict
/// comparisons against zero still work.
pub fn scaled_tol<T: Scalar>(f64_tol: f64) -> f64 {
    if T::is_exact() {
        f64::MIN_POSITIVE
    } else {
        f64_tol * (T::EPSILON / f64::EPSILON)
    }
}

fn float_sign(v: f64) -> Ordering {
    if v > 0.0 {
        Ordering::Greater
    } else if v < 0.0 {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl Scalar for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sign(&self) -> Ordering {
        float_sign(*self)
    }
    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn abs_f64(&self) -> f64 {
        f64::abs(*self)
    }
}

impl Scalar for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;

    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f32(q).unwrap_or(f32::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn sign(&self) -> Ordering {
        float_sign(*self as f64)
    }
    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn finite(&self) -> bool {
        f32::is_finite(*self)
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
}

/// Exact square root of a non-negative big integer, if it is a perfect square.
fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Scalar for BigRational {
    const EPSILON: f64 = 0.0;

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sign(&self) -> Ordering {
        self.numer().sign().cmp(&num_bigint::Sign::NoSign)
    }
    fn try_sqrt(&self) -> Option<Self> {
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }
}
