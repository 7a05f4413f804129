//! Scalar abstraction shared by the interval, box and maximal-function code.
//!
//! Set algebra and the one-dimensional sweep only need ordered field
//! operations, so they are written once against [`Scalar`] and instantiated
//! with [`ExactScalar`] (arbitrary-precision rationals) for certified
//! results or with `f64`/`f32` for fast sampling.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type ExactScalar = BigRational;

/// Ordered field used by the generic set algebra.
pub trait Scalar: Clone + PartialOrd + Num + Neg<Output = Self> + Debug + Send + Sync {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Human-readable rendering used in error messages and reports.
    fn render(&self) -> String;

    /// Total order; panics on NaN, which never enters canonical sets.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("NaN in ordered scalar")
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn render(&self) -> String {
        format_exact(self)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Shorthand for building exact constants in code and tests.
pub fn q(num: i64, den: i64) -> ExactScalar {
    ExactScalar::from_ratio(num, den)
}

/// Exact value of a finite float.
pub fn exact_from_f64(x: f64) -> Result<ExactScalar> {
    BigRational::from_float(x).ok_or_else(|| Error::ParseScalar {
        input: format!("{x}"),
        reason: "not a finite number".into(),
    })
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    // Large numerators/denominators: shift both down to keep 64 significant bits.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Renders an exact scalar as `"num/den"` (the denominator is always printed).
pub fn format_exact(x: &ExactScalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.125"`.
pub fn parse_exact(input: &str) -> Result<ExactScalar> {
    let s = input.trim();
    let err = |reason: &str| Error::ParseScalar {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num = parse_int(n.trim()).ok_or_else(|| err("bad numerator"))?;
        let den = parse_int(d.trim()).ok_or_else(|| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("bad decimal fraction"));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(int_digits).ok_or_else(|| err("bad integer part"))?
        };
        let frac = parse_int(frac_part).ok_or_else(|| err("bad decimal fraction"))?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let magnitude = BigRational::new(whole * &scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    parse_int(s)
        .map(BigRational::from_integer)
        .ok_or_else(|| err("not a rational number"))
}

fn parse_int(s: &str) -> Option<BigInt> {
    if s.is_empty() {
        return None;
    }
    let digits = s.trim_start_matches(['-', '+']);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str_radix(s.trim_start_matches('+'), 10).ok()
}

/// Checked exact division.
pub fn checked_div(a: &ExactScalar, b: &ExactScalar) -> Result<ExactScalar> {
    if b.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

/// Exact integer power of a rational.
pub fn pow_exact(base: &ExactScalar, exp: u32) -> ExactScalar {
    let mut acc = ExactScalar::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Serde adapter storing an exact scalar as a `"num/den"` string.
pub mod serde_exact {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactScalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_exact(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of exact scalars.
pub mod serde_exact_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[ExactScalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_exact))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactScalar>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_exact(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_exact("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_exact("-4").unwrap(), q(-4, 1));
        assert_eq!(parse_exact("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_exact("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_exact("2/-4").unwrap(), q(-1, 2));
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1/2/3").is_err());
        assert!(parse_exact("").is_err());
        assert!(parse_exact("1.").is_err());
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let x = parse_exact("6/-4").unwrap();
        assert_eq!(format_exact(&x), "-3/2");
        assert_eq!(format_exact(&q(3, 1)), "3/1");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(checked_div(&q(1, 1), &q(0, 1)), Err(Error::DivisionByZero));
        assert_eq!(checked_div(&q(1, 2), &q(1, 4)).unwrap(), q(2, 1));
    }

    #[test]
    fn float_conversion_of_huge_ratios() {
        let big = pow_exact(&q(3, 2), 200);
        let expected = 1.5f64.powi(200);
        assert!((Scalar::to_f64(&big) / expected - 1.0).abs() < 1e-12);
        assert_eq!(exact_from_f64(0.375).unwrap(), q(3, 8));
    }
}
