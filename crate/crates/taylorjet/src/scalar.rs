//! Scalar abstraction shared by every module: exact arbitrary-precision
//! rationals drive the algebraic law suite, 64-bit floats drive the
//! transcendental examples.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("reciprocal of zero is undefined")]
    ZeroReciprocal,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not available in the exact rational realization")]
    TranscendentalUnsupported(&'static str),
    #[error("logarithm of a nonpositive value")]
    LogNonpositive,
    #[error("invalid numeric literal `{0}`")]
    InvalidLiteral(String),
}

/// Element of a commutative ring with reciprocals of positive integers.
///
/// Two realizations are provided: [`BigRational`] (exact, used by every
/// law test) and [`f64`] (inexact, used on the transcendental path).
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Exact realizations compare with `==` and ignore tolerances.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;

    /// Canonical image of an integer, `1 + 1 + … + 1`.
    fn from_int(k: i64) -> Self;

    /// The element `1/n`, satisfying `inv_int(n) * from_int(n) == one`.
    fn inv_int(n: u64) -> Result<Self, ScalarError>;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, ScalarError>;
    fn is_zero(&self) -> bool;

    fn sin(&self) -> Result<Self, ScalarError>;
    fn cos(&self) -> Result<Self, ScalarError>;
    fn exp(&self) -> Result<Self, ScalarError>;
    fn ln(&self) -> Result<Self, ScalarError>;

    /// Parses `p/q`, integer, or decimal literals.
    fn parse_literal(text: &str) -> Result<Self, ScalarError>;

    /// `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`; exact realizations
    /// ignore the tolerances entirely.
    fn approx_eq(&self, other: &Self, rel_tol: &Self, abs_tol: &Self) -> bool;

    fn from_ratio(p: i64, q: u64) -> Self {
        Self::from_int(p).mul(&Self::inv_int(q).expect("nonzero denominator"))
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

fn parse_rational(text: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::InvalidLiteral(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let (sign, digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.is_empty() && frac_part.is_empty()) {
            return Err(bad());
        }
        let int_val: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let frac_val: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int_val * &scale + frac_val;
        return Ok(BigRational::new(BigInt::from(sign) * magnitude, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_int(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn inv_int(n: u64) -> Result<Self, ScalarError> {
        if n == 0 {
            return Err(ScalarError::ZeroReciprocal);
        }
        Ok(BigRational::new(BigInt::one(), BigInt::from(n)))
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if Zero::is_zero(rhs) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn sin(&self) -> Result<Self, ScalarError> {
        Err(ScalarError::TranscendentalUnsupported("sin"))
    }

    fn cos(&self) -> Result<Self, ScalarError> {
        Err(ScalarError::TranscendentalUnsupported("cos"))
    }

    fn exp(&self) -> Result<Self, ScalarError> {
        Err(ScalarError::TranscendentalUnsupported("exp"))
    }

    fn ln(&self) -> Result<Self, ScalarError> {
        Err(ScalarError::TranscendentalUnsupported("ln"))
    }

    fn parse_literal(text: &str) -> Result<Self, ScalarError> {
        parse_rational(text)
    }

    fn approx_eq(&self, other: &Self, _rel_tol: &Self, _abs_tol: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(k: i64) -> Self {
        k as f64
    }

    fn inv_int(n: u64) -> Result<Self, ScalarError> {
        if n == 0 {
            return Err(ScalarError::ZeroReciprocal);
        }
        Ok(1.0 / n as f64)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    // IEEE semantics: dividing by 0.0 yields an infinity, not an error.
    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self / rhs)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn sin(&self) -> Result<Self, ScalarError> {
        Ok(f64::sin(*self))
    }

    fn cos(&self) -> Result<Self, ScalarError> {
        Ok(f64::cos(*self))
    }

    fn exp(&self) -> Result<Self, ScalarError> {
        Ok(f64::exp(*self))
    }

    fn ln(&self) -> Result<Self, ScalarError> {
        Ok(f64::ln(*self))
    }

    fn parse_literal(text: &str) -> Result<Self, ScalarError> {
        let s = text.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: f64 = num.trim().parse().map_err(|_| ScalarError::InvalidLiteral(text.to_string()))?;
            let d: f64 = den.trim().parse().map_err(|_| ScalarError::InvalidLiteral(text.to_string()))?;
            return Ok(n / d);
        }
        s.parse().map_err(|_| ScalarError::InvalidLiteral(text.to_string()))
    }

    fn approx_eq(&self, other: &Self, rel_tol: &Self, abs_tol: &Self) -> bool {
        if self == other {
            return true;
        }
        let diff = (self - other).abs();
        diff <= abs_tol + rel_tol * self.abs().max(other.abs())
    }
}

/// Exact rational `p/q` used pervasively in tests.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[allow(unused)]
pub(crate) fn big_rational_is_negative(r: &BigRational) -> bool {
    r.is_negative()
}
