//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! values giving roughly 106 significant bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use super::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        // One Newton correction on the double estimate.
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Self { hi, lo }
    }

    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Self { hi, lo: 0.0 };
        }
        let rest = n - BigInt::from_f64(hi).expect("finite");
        Self::new(hi, rest.to_f64().unwrap_or(0.0))
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::from(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            c => c,
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi)
    }
}

impl Scalar for DoubleDouble {
    const EPSILON: f64 = 4.93038065763132e-32;

    fn from_f64(v: f64) -> Self {
        Self::from(v)
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }
    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }
    fn sign(&self) -> Ordering {
        if self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0) {
            Ordering::Greater
        } else if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn try_sqrt(&self) -> Option<Self> {
        (self.sign() != Ordering::Less).then(|| DoubleDouble::sqrt(*self))
    }
    fn finite(&self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
    fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        (a - b).to_f64().abs() <= tol
    }

    #[test]
    fn one_third_times_three() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0);
        assert!(close(back, DoubleDouble::ONE, 1e-31));
        // hi alone is off by ~1e-17, the pair is not
        assert!((third.hi() * 3.0 - 1.0).abs() < 1e-15);
        assert!(third.lo() != 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = DoubleDouble::from(2.0).sqrt();
        assert!(close(r * r, DoubleDouble::from(2.0), 1e-31));
        assert_eq!(r.hi(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn rational_conversion_keeps_extra_bits() {
        let q = BigRational::new(1.into(), 10.into());
        let d = DoubleDouble::from_rational(&q);
        let ten = d * DoubleDouble::from(10.0);
        assert!(close(ten, DoubleDouble::ONE, 1e-31));
        let big = BigRational::from_integer(BigInt::from(3).pow(80));
        let d = DoubleDouble::from_rational(&big);
        assert!(d.lo() != 0.0);
    }

    #[test]
    fn ordering_and_sign() {
        let a = DoubleDouble::new(1.0, 1e-20);
        assert!(a > DoubleDouble::ONE);
        assert_eq!((DoubleDouble::ONE - a).sign(), Ordering::Less);
        assert_eq!(DoubleDouble::ZERO.sign(), Ordering::Equal);
        assert_eq!(DoubleDouble::from(-4.0).try_sqrt(), None);
    }

    #[test]
    fn cancellation_is_resolved() {
        // (1 + 2^-70) - 1 is invisible in f64 but exact here.
        let tiny = 2f64.powi(-70);
        let a = DoubleDouble::ONE + DoubleDouble::from(tiny);
        assert_eq!((a - DoubleDouble::ONE).to_f64(), tiny);
    }
}
