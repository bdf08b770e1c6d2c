//! Scalar backends: `f64` and exact `BigRational`.
//!
//! Every algebraic layer of the crate is generic over [`Scalar`], so each
//! operator identity can be checked both in floating point and in exact
//! arithmetic. The rational backend has no square root, which is why norms
//! are carried around squared throughout the crate; only reporting code
//! takes square roots, after conversion to `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Coefficient field shared by all polynomial operations.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (identities must hold with residual 0).
    const EXACT: bool;
    /// Backend name used in reports and CLI flags.
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact zero test (bitwise for `f64`; no epsilon pruning).
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// `1/sqrt(self)` where the backend supports it (`f64`), `None` otherwise.
    fn inv_sqrt(&self) -> Option<Self>;
    /// Parse from a decimal string (`-0.25`) or a fraction (`-1/4`).
    /// Exact in the rational backend; rejects nothing a float would accept.
    fn parse(text: &str) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "f64";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn inv_sqrt(&self) -> Option<Self> {
        Some(1.0 / self.sqrt())
    }
    fn parse(text: &str) -> Result<Self> {
        if let Some((num, den)) = text.split_once('/') {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in `{text}`")))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
            return Ok(n / d);
        }
        text.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{text}` is not a number")))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "rational";

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn inv_sqrt(&self) -> Option<Self> {
        None
    }
    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in `{text}`")))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
            if Zero::is_zero(&d) {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            return Ok(Rational::new(n, d));
        }
        // Decimal string -> exact rational: shift the point out.
        let (sign, body) = match text.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("`{text}` is not a number")));
        }
        let digits = format!("{int_part}{frac_part}");
        let numerator: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("`{text}` is not a decimal number")))?;
        let denominator = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Rational::new(BigInt::from(sign) * numerator, denominator))
    }
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer<S: Scalar>(x: &S, n: u32) -> S {
    let mut acc = S::one();
    for i in 0..n {
        acc = acc * (x.clone() + S::from_int(i as i64));
    }
    acc
}
