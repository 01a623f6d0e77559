use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SurdError;
use crate::densecore::{DoubleDouble, Scalar};

/// New primes tried when a square root needs a field extension.
const EXTENSION_PRIMES: [u64; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// The generators of a multi-quadratic field `Q(√d₁, …, √d_k)`, kept as
/// sorted distinct primes so that the `2^k` radical products are linearly
/// independent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SurdField {
    generators: Vec<u64>,
}

impl SurdField {
    /// Field generated by the square roots of the given square-free integers.
    pub fn new(generators: &[u64]) -> Result<Self, SurdError> {
        let mut primes = Vec::new();
        for &g in generators {
            let (square, free) = square_free_split(g);
            if g < 2 || square != 1 {
                return Err(SurdError::NotSquareFree(g));
            }
            primes.extend(prime_factors(free));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { generators: primes })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn degree(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn union(&self, other: &SurdField) -> SurdField {
        let mut g = self.generators.clone();
        g.extend_from_slice(&other.generators);
        g.sort_unstable();
        g.dedup();
        SurdField { generators: g }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Split `n = s²·t` with `t` square-free.
fn square_free_split(mut n: u64) -> (u64, u64) {
    let mut s = 1;
    let mut t = 1;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            s *= p;
        }
        if n % p == 0 {
            n /= p;
            t *= p;
        }
        p += 1;
    }
    (s, t * n)
}

/// Exact element `Σ q_r·√r` of a multi-quadratic field, keyed by the
/// square-free radicand `r` (1 for the rational part). Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SurdElem {
    terms: BTreeMap<u64, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl SurdElem {
    pub fn rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    /// `√n` for a positive integer, reduced to `s·√t` with `t` square-free.
    pub fn sqrt_int(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (s, t) = square_free_split(n);
        let mut terms = BTreeMap::new();
        terms.insert(t, BigRational::from_integer(BigInt::from(s)));
        Self { terms }
    }

    /// Coefficient of `√radicand`.
    pub fn coeff(&self, radicand: u64) -> BigRational {
        self.terms.get(&radicand).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&r, q)| (r, q))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&r| r == 1)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeff(1))
    }

    /// Smallest field (prime generators) containing this element.
    pub fn field(&self) -> SurdField {
        let mut g: Vec<u64> = self.terms.keys().flat_map(|&r| prime_factors(r)).collect();
        g.sort_unstable();
        g.dedup();
        SurdField { generators: g }
    }

    fn add_term(&mut self, r: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(r).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&r);
        }
    }

    fn scale_rational(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&r, c)| (r, c * q)).collect() }
    }

    /// Flip the sign of `√p` for prime `p`.
    pub fn conjugate(&self, p: u64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&r, q)| (r, if r % p == 0 { -q.clone() } else { q.clone() }))
                .collect(),
        }
    }

    fn largest_prime(&self) -> Option<u64> {
        self.field().generators.last().copied()
    }

    /// Split as `u + v·√p` with `u`, `v` free of `p`.
    fn split(&self, p: u64) -> (SurdElem, SurdElem) {
        let mut u = SurdElem::zero();
        let mut v = SurdElem::zero();
        for (&r, q) in &self.terms {
            if r % p == 0 {
                v.add_term(r / p, q.clone());
            } else {
                u.add_term(r, q.clone());
            }
        }
        (u, v)
    }

    /// Exact inverse by successive conjugation.
    pub fn inv(&self) -> Result<Self, SurdError> {
        if self.is_zero() {
            return Err(SurdError::DivisionByZero);
        }
        let mut num = SurdElem::one();
        let mut den = self.clone();
        while let Some(p) = den.largest_prime() {
            let c = den.conjugate(p);
            num = &num * &c;
            den = &den * &c;
        }
        let d = den.coeff(1);
        Ok(num.scale_rational(&d.recip()))
    }

    /// Exact sign, decided recursively on the largest prime.
    pub fn signum(&self) -> Ordering {
        let Some(p) = self.largest_prime() else {
            return self.coeff(1).numer().sign().cmp(&num_bigint::Sign::NoSign);
        };
        let (u, v) = self.split(p);
        let su = u.signum();
        let sv = v.signum();
        if su == Ordering::Equal {
            return sv;
        }
        if sv == Ordering::Equal || su == sv {
            return su;
        }
        // opposite signs: compare u² with p·v²
        let d = &(&u * &u) - &(&(&v * &v) * &SurdElem::int(p as i64));
        match d.signum() {
            Ordering::Greater => su,
            Ordering::Less => sv,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Nearest double, summed in double-double to survive cancellation.
    pub fn to_f64(&self) -> f64 {
        self.to_dd().to_f64()
    }

    pub fn to_dd(&self) -> DoubleDouble {
        self.terms.iter().fold(DoubleDouble::ZERO, |acc, (&r, q)| {
            let root = DoubleDouble::from(r as f64).sqrt();
            acc + DoubleDouble::from_rational(q) * root
        })
    }

    /// Value in another scalar type. Exact rational targets succeed only
    /// for rational elements.
    pub fn to_scalar<T: Scalar>(&self) -> Option<T> {
        if T::is_exact() {
            let mut acc = T::zero();
            for (&r, q) in &self.terms {
                let root = T::from_i64(r as i64).try_sqrt()?;
                acc = acc + T::from_rational(q) * root;
            }
            return Some(acc);
        }
        if T::EPSILON >= f64::EPSILON {
            Some(T::from_f64(self.to_f64()))
        } else {
            let d = self.to_dd();
            Some(T::from_f64(d.hi()) + T::from_f64(d.lo()))
        }
    }

    /// Square root inside `Q(√p : p ∈ primes)`, if one exists there.
    fn sqrt_within(&self, primes: &[u64]) -> Option<SurdElem> {
        if self.is_zero() {
            return Some(SurdElem::zero());
        }
        let Some((&p, rest)) = primes.split_last() else {
            let q = self.as_rational()?;
            return q.try_sqrt().map(SurdElem::rational);
        };
        let (u, v) = self.split(p);
        let root_p = SurdElem::sqrt_int(p);
        if v.is_zero() {
            if let Some(s) = u.sqrt_within(rest) {
                return Some(s);
            }
            let over_p = u.scale_rational(&BigRational::new(1.into(), (p as i64).into()));
            return over_p.sqrt_within(rest).map(|s| &s * &root_p);
        }
        // (x + y√p)² = u + v√p  ⇔  x² + p·y² = u, 2xy = v
        let norm = &(&u * &u) - &(&(&v * &v) * &SurdElem::int(p as i64));
        let s = norm.sqrt_within(rest)?;
        let half = BigRational::new(1.into(), 2.into());
        for cand in [(&u + &s).scale_rational(&half), (&u - &s).scale_rational(&half)] {
            if let Some(x) = cand.sqrt_within(rest) {
                if x.is_zero() {
                    continue;
                }
                let y = &v * &(&x + &x).inv().ok()?;
                return Some(&x + &(&y * &root_p));
            }
        }
        None
    }

    fn positive_root(r: SurdElem) -> SurdElem {
        if r.signum() == Ordering::Less {
            -r
        } else {
            r
        }
    }

    /// Exact non-negative square root.
    ///
    /// Succeeds when the root lies in the element's own field or in an
    /// extension by a single new square-free generator (built from primes
    /// below 100 for irrational inputs; any generator for rational inputs).
    pub fn sqrt(&self) -> Result<SurdElem, SurdError> {
        match self.signum() {
            Ordering::Less => return Err(SurdError::NotRepresentable(format!("sqrt of negative {self}"))),
            Ordering::Equal => return Ok(SurdElem::zero()),
            Ordering::Greater => {}
        }
        if let Some(q) = self.as_rational() {
            // q = n/d  →  √q = √(n·d)/d
            let nd = q.numer() * q.denom();
            let nd_u64 = nd.to_u64().ok_or_else(|| {
                SurdError::NotRepresentable(format!("radicand of {self} exceeds 64 bits"))
            })?;
            let (s, t) = square_free_split(nd_u64);
            let mut terms = BTreeMap::new();
            terms.insert(t, BigRational::new(BigInt::from(s), q.denom().clone()));
            return Ok(SurdElem { terms });
        }
        let own = self.field();
        if let Some(r) = self.sqrt_within(own.generators()) {
            return Ok(Self::positive_root(r));
        }
        let fresh: Vec<u64> =
            EXTENSION_PRIMES.iter().copied().filter(|p| !own.generators().contains(p)).collect();
        let mut candidates: Vec<u64> = fresh.clone();
        for (i, &a) in fresh.iter().enumerate() {
            for &b in &fresh[i + 1..] {
                candidates.push(a * b);
            }
        }
        for t in candidates {
            let scaled = self.scale_rational(&BigRational::new(1.into(), (t as i64).into()));
            if let Some(r) = scaled.sqrt_within(own.generators()) {
                return Ok(Self::positive_root(&r * &SurdElem::sqrt_int(t)));
            }
        }
        Err(SurdError::NotRepresentable(format!("sqrt({self}) needs nested radicals")))
    }
}

impl Zero for SurdElem {
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SurdElem {
    fn one() -> Self {
        Self::int(1)
    }
}

impl<'a> Add<&'a SurdElem> for &'a SurdElem {
    type Output = SurdElem;
    fn add(self, o: &SurdElem) -> SurdElem {
        let mut out = self.clone();
        for (&r, q) in &o.terms {
            out.add_term(r, q.clone());
        }
        out
    }
}

impl<'a> Sub<&'a SurdElem> for &'a SurdElem {
    type Output = SurdElem;
    fn sub(self, o: &SurdElem) -> SurdElem {
        let mut out = self.clone();
        for (&r, q) in &o.terms {
            out.add_term(r, -q.clone());
        }
        out
    }
}

impl<'a> Mul<&'a SurdElem> for &'a SurdElem {
    type Output = SurdElem;
    fn mul(self, o: &SurdElem) -> SurdElem {
        let mut out = SurdElem::zero();
        for (&a, qa) in &self.terms {
            for (&b, qb) in &o.terms {
                // √a·√b = g·√(ab/g²), g = gcd(a, b)
                let g = a.gcd(&b);
                let r = (a / g) * (b / g);
                out.add_term(r, qa * qb * BigRational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
}

impl Neg for &SurdElem {
    type Output = SurdElem;
    fn neg(self) -> SurdElem {
        SurdElem { terms: self.terms.iter().map(|(&r, q)| (r, -q.clone())).collect() }
    }
}

macro_rules! by_value {
    ($tr:ident, $f:ident) => {
        impl $tr for SurdElem {
            type Output = SurdElem;
            fn $f(self, o: SurdElem) -> SurdElem {
                (&self).$f(&o)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl Neg for SurdElem {
    type Output = SurdElem;
    fn neg(self) -> SurdElem {
        -&self
    }
}

impl Div for SurdElem {
    type Output = SurdElem;
    /// Panics on division by zero, like the primitive types; use
    /// [`SurdElem::inv`] for a fallible inverse.
    fn div(self, o: SurdElem) -> SurdElem {
        &self * &o.inv().expect("division by zero surd")
    }
}

impl fmt::Display for SurdElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&r, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if r == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "s{r}")?;
            } else {
                write!(f, "{mag}*s{r}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SurdElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

impl Scalar for SurdElem {
    const EPSILON: f64 = 0.0;

    fn from_f64(v: f64) -> Self {
        SurdElem::rational(BigRational::from_float(v).expect("finite float"))
    }
    fn from_rational(q: &BigRational) -> Self {
        SurdElem::rational(q.clone())
    }
    fn to_f64(&self) -> f64 {
        SurdElem::to_f64(self)
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn try_sqrt(&self) -> Option<Self> {
        self.sqrt().ok()
    }
    fn from_i64(v: i64) -> Self {
        SurdElem::int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: u64) -> SurdElem {
        SurdElem::sqrt_int(n)
    }
    fn i(n: i64) -> SurdElem {
        SurdElem::int(n)
    }

    #[test]
    fn difference_of_squares() {
        let a = &i(1) + &s(2);
        let b = &i(1) - &s(2);
        assert_eq!(&a * &b, i(-1));
    }

    #[test]
    fn square_extraction() {
        assert_eq!(&s(3) * &s(15), &i(3) * &s(5));
        assert_eq!(s(12), &i(2) * &s(3));
        assert_eq!(&s(6) * &s(6), i(6));
    }

    #[test]
    fn inverses() {
        let a = &i(1) + &s(2);
        assert_eq!(a.inv().unwrap(), &s(2) - &i(1));
        assert_eq!(i(2).inv().unwrap(), SurdElem::frac(1, 2));
        let b = (&i(4) + &s(7)).scale_rational(&BigRational::new(1.into(), 8.into()));
        assert_eq!(&b.inv().unwrap() * &b, i(1));
        let c = &(&(&s(2) + &s(3)) + &s(5)) + &s(7);
        assert_eq!(&c.inv().unwrap() * &c, i(1));
        assert_eq!(SurdElem::zero().inv(), Err(SurdError::DivisionByZero));
    }

    #[test]
    fn square_roots() {
        assert_eq!(SurdElem::frac(1, 2).sqrt().unwrap(), &s(2) * &SurdElem::frac(1, 2));
        assert_eq!(SurdElem::frac(9, 4).sqrt().unwrap(), SurdElem::frac(3, 2));
        assert!(matches!((&i(1) + &s(2)).sqrt(), Err(SurdError::NotRepresentable(_))));
        // (1 + √2)² = 3 + 2√2
        let sq = &i(3) + &(&i(2) * &s(2));
        assert_eq!(sq.sqrt().unwrap(), &i(1) + &s(2));
        // the second Cholesky pivot of the supercompact example needs √2
        let piv = (&i(4) - &s(7)).scale_rational(&BigRational::new(1.into(), 16.into()));
        let r = piv.sqrt().unwrap();
        let expect = (&(&s(7) - &i(1)) * &s(2)).scale_rational(&BigRational::new(1.into(), 8.into()));
        assert_eq!(r, expect);
        assert!(i(-1).sqrt().is_err());
    }

    #[test]
    fn exact_signs() {
        assert_eq!((&s(2) - &SurdElem::frac(1414, 1000)).signum(), Ordering::Greater);
        assert_eq!((&s(2) - &SurdElem::frac(1415, 1000)).signum(), Ordering::Less);
        // √7 − 1 − √3 ≈ −0.086
        assert_eq!((&(&s(7) - &i(1)) - &s(3)).signum(), Ordering::Less);
        // 4 − √7 − √2 ≈ −0.060
        assert_eq!((&(&i(4) - &s(7)) - &s(2)).signum(), Ordering::Less);
        assert_eq!(SurdElem::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn float_conversion() {
        assert_eq!(s(2).to_f64(), std::f64::consts::SQRT_2);
        let a = (&s(7) + &i(1)).scale_rational(&BigRational::new(1.into(), 8.into()));
        assert_eq!(a.to_f64(), 0.45571891388307384);
        assert!((a.to_f64() - 0.4557189138830738).abs() <= 4.0 * f64::EPSILON * 0.4557);
        assert_eq!(SurdElem::zero().to_f64(), 0.0);
        // cancellation-heavy value keeps relative accuracy
        let near = &s(2) - &SurdElem::rational(BigRational::from_float(std::f64::consts::SQRT_2).unwrap());
        let v = near.to_f64();
        assert!((v + 9.667293313452913e-17).abs() < 1e-30);
    }

    #[test]
    fn display_forms() {
        let a = (&s(7) + &i(1)).scale_rational(&BigRational::new(1.into(), 8.into()));
        assert_eq!(a.to_string(), "1/8 + 1/8*s7");
        assert_eq!((-&s(3)).to_string(), "-s3");
        assert_eq!(SurdElem::zero().to_string(), "0");
    }

    #[test]
    fn fields() {
        assert_eq!(SurdField::new(&[15, 2]).unwrap().generators(), &[2, 3, 5]);
        assert!(SurdField::new(&[12]).is_err());
        let e = &s(35) + &s(3);
        assert_eq!(e.field().generators(), &[3, 5, 7]);
        assert_eq!(e.field().degree(), 8);
        let u = SurdField::new(&[2]).unwrap().union(&SurdField::new(&[7]).unwrap());
        assert_eq!(u.generators(), &[2, 7]);
    }

    fn small_surd() -> impl Strategy<Value = SurdElem> {
        let radicands = prop::sample::select(vec![1u64, 2, 3, 5, 6, 7, 10, 15, 21, 35, 210]);
        prop::collection::vec((radicands, -6i64..7, 1i64..5), 0..4).prop_map(|ts| {
            let mut e = SurdElem::zero();
            for (r, n, d) in ts {
                e.add_term(r, BigRational::new(n.into(), d.into()));
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms(a in small_surd(), b in small_surd(), c in small_surd()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), SurdElem::one());
            }
        }

        #[test]
        fn sqrt_squares_back(a in small_surd()) {
            let sq = &a * &a;
            let r = sq.sqrt().unwrap();
            prop_assert_eq!(&r * &r, sq);
            prop_assert!(r.signum() != Ordering::Less);
        }

        #[test]
        fn sign_matches_float(a in small_surd()) {
            let f = a.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(a.signum(), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
            }
        }
    }
}
