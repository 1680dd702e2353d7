//! Exact univariate polynomials in `q` over the rationals.
//!
//! A [`Poly`] is stored sparsely as a map from exponent to nonzero rational
//! coefficient. Terms like `q^m (q - 1)` stay small even when `m` is large.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Build a rational from a small integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integral rational.
pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division leaves a nonzero remainder {remainder}")]
    NonZeroRemainder { remainder: Poly },
    #[error("q-integer index must be non-negative, got {0}")]
    NegativeIndex(i64),
}

/// Degree of a polynomial. The zero polynomial has degree [`Degree::NegInfinity`],
/// which orders below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Degree of a product: `deg(ab) = deg(a) + deg(b)` over the rationals.
    pub fn plus(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial in `q` with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    // Invariant: no zero coefficients are stored.
    terms: BTreeMap<u64, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(integer(c))
    }

    /// `c * q^exp`.
    pub fn monomial(c: Rational, exp: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { terms }
    }

    /// `q^exp`.
    pub fn q_pow(exp: u64) -> Self {
        Poly::monomial(Rational::one(), exp)
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, Rational)>,
    {
        let mut p = Poly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Build from integer coefficients in ascending exponent order.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Poly::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(e, &c)| (e as u64, integer(c))),
        )
    }

    fn add_term(&mut self, exp: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(One::is_one)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |&d| Degree::Finite(d))
    }

    /// Coefficient of `q^exp` (zero if absent).
    pub fn coeff(&self, exp: u64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    /// The constant value when the polynomial has degree at most zero.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.degree() {
            Degree::NegInfinity => Some(Rational::zero()),
            Degree::Finite(0) => Some(self.coeff(0)),
            Degree::Finite(_) => None,
        }
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &Rational)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(&e, a)| (e, a * c)).collect(),
        }
    }

    /// Common denominator and integer numerators, ascending by exponent.
    fn integer_parts(&self) -> (BigInt, Vec<(u64, BigInt)>) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .terms
            .iter()
            .map(|(&e, c)| (e, c.numer() * (&den / c.denom())))
            .collect();
        (den, nums)
    }

    fn from_integer_parts(den: &BigInt, nums: impl IntoIterator<Item = (u64, BigInt)>) -> Poly {
        let terms = nums
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| {
                let c = if den.is_one() {
                    Rational::from_integer(c)
                } else {
                    Rational::new(c, den.clone())
                };
                (e, c)
            })
            .collect();
        Poly { terms }
    }

    /// Multiply by `[n]_q`. Coefficient `j` of the product is the sum of a
    /// window of `n` consecutive coefficients, so this is linear in the
    /// degree rather than in `degree * n`.
    pub fn mul_q_integer(&self, n: u64) -> Poly {
        if n == 0 || self.is_zero() {
            return Poly::zero();
        }
        let (den, nums) = self.integer_parts();
        let low = nums[0].0;
        let high = nums.last().expect("nonzero").0;
        if high - low > 4 * nums.len() as u64 * n + 64 {
            return self * &q_integer(n);
        }
        let mut dense = vec![BigInt::zero(); (high - low + 1) as usize];
        for (e, c) in nums {
            dense[(e - low) as usize] = c;
        }
        let width = (high - low + n) as usize;
        let mut window = BigInt::zero();
        let mut out = Vec::with_capacity(width);
        for j in 0..width {
            if let Some(c) = dense.get(j) {
                window += c;
            }
            if j >= n as usize {
                if let Some(c) = dense.get(j - n as usize) {
                    window -= c;
                }
            }
            out.push((low + j as u64, window.clone()));
        }
        Poly::from_integer_parts(&den, out)
    }

    /// Multiply by `q^shift`.
    pub fn shift(&self, shift: u64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + shift, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Quotient and remainder of long division by `divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        let (div_deg, div_lead) = match (divisor.degree(), divisor.leading_coeff()) {
            (Degree::Finite(d), Some(c)) => (d, c.clone()),
            _ => return Err(PolyError::DivisionByZero),
        };
        let mut quotient = Poly::zero();
        let mut rem = self.clone();
        while let Degree::Finite(rd) = rem.degree() {
            if rd < div_deg {
                break;
            }
            let c = rem.leading_coeff().expect("nonzero remainder") / &div_lead;
            let step = Poly::monomial(c, rd - div_deg);
            rem = &rem - &(&step * divisor);
            quotient = &quotient + &step;
        }
        Ok((quotient, rem))
    }

    /// Quotient `c` with `self = divisor * c`, failing when the division is not exact.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        let (quotient, remainder) = self.div_rem(divisor)?;
        if remainder.is_zero() {
            Ok(quotient)
        } else {
            Err(PolyError::NonZeroRemainder { remainder })
        }
    }

    /// Value at `q = x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut last = self.terms.keys().next_back().copied().unwrap_or(0);
        for (&e, c) in self.terms.iter().rev() {
            acc *= num_traits::pow(x.clone(), (last - e) as usize);
            acc += c;
            last = e;
        }
        acc * num_traits::pow(x.clone(), last as usize)
    }

    /// If this polynomial equals `[n]_q` for some `n`, return that `n`.
    pub fn as_q_integer(&self) -> Option<u64> {
        match self.degree() {
            Degree::NegInfinity => Some(0),
            Degree::Finite(d) => {
                let n = d + 1;
                (self.terms.len() as u64 == n && self.terms.values().all(One::is_one)).then_some(n)
            }
        }
    }
}

/// The q-integer `[n]_q = 1 + q + ... + q^(n-1)`, with `[0]_q = 0`.
pub fn q_integer(n: u64) -> Poly {
    Poly {
        terms: (0..n).map(|e| (e, Rational::one())).collect(),
    }
}

/// Signed variant of [`q_integer`] that rejects negative indices.
pub fn q_integer_checked(n: i64) -> Result<Poly, PolyError> {
    u64::try_from(n)
        .map(q_integer)
        .map_err(|_| PolyError::NegativeIndex(n))
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        // Work on integer numerators over a common denominator so the inner
        // loop never reduces a fraction.
        let (da, a) = self.integer_parts();
        let (db, b) = rhs.integer_parts();
        let top = a.last().expect("nonzero").0 + b.last().expect("nonzero").0;
        let bottom = a[0].0 + b[0].0;
        let width = top - bottom + 1;
        let mut acc: BTreeMap<u64, BigInt> = BTreeMap::new();
        if width <= 4 * (a.len() * b.len()) as u64 + 64 {
            let mut dense = vec![BigInt::zero(); width as usize];
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    dense[(ea + eb - bottom) as usize] += ca * cb;
                }
            }
            for (i, c) in dense.into_iter().enumerate() {
                acc.insert(bottom + i as u64, c);
            }
        } else {
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    *acc.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
        }
        Poly::from_integer_parts(&(da * db), acc)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $method:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &'a Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Poly> for &'a Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Arbitrary total order (degree first, then coefficients from the top) so
// polynomials can key sorted collections.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.terms.iter().rev().cmp(other.terms.iter().rev()))
    }
}

/// Canonical rendering: descending exponents, `c*q^e`, `q^1` as `q`,
/// `q^0` omitted, e.g. `q^3 + 1/2*q - 1`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let var = match e {
                0 => None,
                1 => Some("q".to_string()),
                _ => Some(format!("q^{e}")),
            };
            match var {
                None => write!(f, "{mag}")?,
                Some(v) if mag.is_one() => f.write_str(&v)?,
                Some(v) => write!(f, "{mag}*{v}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Serialize a rational as its `a/b` text form.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_minus_q() -> Poly {
        Poly::from_coeffs(&[1, -1])
    }

    #[test]
    fn q_integer_small_cases() {
        assert!(q_integer(0).is_zero());
        assert_eq!(q_integer(1), Poly::one());
        assert_eq!(q_integer(3), Poly::from_coeffs(&[1, 1, 1]));
        assert_eq!(q_integer_checked(-1), Err(PolyError::NegativeIndex(-1)));
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&q_integer(2) + &Poly::zero(), Poly::from_coeffs(&[1, 1]));
        // (1 - q)(1 + q + q^2) expanded by hand: 1 - q^3
        assert_eq!(
            one_minus_q() * q_integer(3),
            Poly::from_coeffs(&[1, 0, 0, -1])
        );
        assert_eq!(
            Poly::from_coeffs(&[1, 1]).pow(2),
            Poly::from_coeffs(&[1, 2, 1])
        );
        assert_eq!(Poly::q().pow(0), Poly::one());
        assert_eq!(Poly::zero().pow(0), Poly::one());
    }

    #[test]
    fn rational_products() {
        // (1/2 + q/3)(2 - 3q/2) = 1 - q/12 - q^2/2
        let a = Poly::from_terms([(0, rational(1, 2)), (1, rational(1, 3))]);
        let b = Poly::from_terms([(0, integer(2)), (1, rational(-3, 2))]);
        let expected =
            Poly::from_terms([(0, integer(1)), (1, rational(-1, 12)), (2, rational(-1, 2))]);
        assert_eq!(&a * &b, expected);
        // sparse operands take the map path
        let far = Poly::q_pow(10_000) + Poly::one();
        assert_eq!(
            &far * &far,
            Poly::q_pow(20_000) + Poly::q_pow(10_000).scale(&integer(2)) + Poly::one()
        );
    }

    #[test]
    fn mul_q_integer_matches_product() {
        let p = Poly::from_terms([(0, rational(1, 2)), (3, integer(-4)), (4, rational(5, 3))]);
        for n in 0..7 {
            assert_eq!(p.mul_q_integer(n), &p * &q_integer(n));
        }
        let sparse = Poly::q_pow(5_000) - Poly::one();
        assert_eq!(sparse.mul_q_integer(3), &sparse * &q_integer(3));
        assert!(Poly::zero().mul_q_integer(4).is_zero());
    }

    #[test]
    fn exact_division() {
        let num = Poly::from_coeffs(&[1, 0, 0, -1]);
        assert_eq!(num.exact_div(&one_minus_q()).unwrap(), q_integer(3));
        // long division of 1 - q^3 by 1 + q leaves remainder 2
        match num.exact_div(&Poly::from_coeffs(&[1, 1])) {
            Err(PolyError::NonZeroRemainder { remainder }) => {
                assert_eq!(remainder, Poly::from_int(2))
            }
            other => panic!("expected remainder, got {other:?}"),
        }
        assert!(Poly::zero().exact_div(&one_minus_q()).unwrap().is_zero());
        assert_eq!(num.exact_div(&Poly::zero()), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn degrees() {
        assert_eq!(q_integer(5).degree(), Degree::Finite(4));
        assert_eq!(Poly::zero().degree(), Degree::NegInfinity);
        assert_eq!(
            Poly::from_coeffs(&[-1, -1, 1, 1]).degree(),
            Degree::Finite(3)
        );
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(
            Degree::NegInfinity.plus(Degree::Finite(3)),
            Degree::NegInfinity
        );
    }

    #[test]
    fn rendering() {
        let p = Poly::from_terms([(3, integer(1)), (1, rational(1, 2)), (0, integer(-1))]);
        assert_eq!(p.to_string(), "q^3 + 1/2*q - 1");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::from_coeffs(&[0, -1]).to_string(), "-q");
        assert_eq!(
            Poly::from_terms([(2, rational(-3, 4))]).to_string(),
            "-3/4*q^2"
        );
        assert_eq!(q_integer(3).to_string(), "q^2 + q + 1");
    }

    #[test]
    fn cancellation_keeps_invariant() {
        let p = Poly::from_coeffs(&[1, 2, 3]);
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        assert!(p.scale(&Rational::zero()).is_zero());
    }

    #[test]
    fn evaluation_and_recognition() {
        assert_eq!(q_integer(7).eval(&integer(1)), integer(7));
        assert_eq!(Poly::from_coeffs(&[0, 0, 1]).eval(&integer(3)), integer(9));
        assert_eq!(q_integer(4).as_q_integer(), Some(4));
        assert_eq!(Poly::zero().as_q_integer(), Some(0));
        assert_eq!(Poly::from_coeffs(&[1, 2]).as_q_integer(), None);
        assert_eq!(Poly::q().as_q_integer(), None);
    }
}
