//! Exact rational helpers shared by every module: parsing, canonical
//! `p/q` rendering, and a strictly positive newtype.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The exact scalar type used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("cannot parse {0:?} as an exact rational (expected p or p/q)")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: String },
}

/// Parses `p`, `p/q` (with optional sign and surrounding spaces), or a finite
/// decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RationalError::Parse(text.to_string()));
    }
    if let Some((num, den)) = trimmed.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| RationalError::Parse(text.into()))?;
        let den = parse_integer(den.trim()).ok_or_else(|| RationalError::Parse(text.into()))?;
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = trimmed.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RationalError::Parse(text.to_string()));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['+', '-']);
        let int_value = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_integer(int_digits).ok_or_else(|| RationalError::Parse(text.into()))?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac_value: BigInt = frac_part.parse().map_err(|_| RationalError::Parse(text.into()))?;
        let magnitude = Rational::new(int_value * &scale + frac_value, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    parse_integer(trimmed)
        .map(Rational::from_integer)
        .ok_or_else(|| RationalError::Parse(text.to_string()))
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('+').unwrap_or(text);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Always renders `p/q` with `q > 0` in lowest terms, including `q = 1`.
pub fn fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn rational_from_i64(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Lossy conversion for display and plotting only.
pub fn to_f64(value: &Rational) -> f64 {
    let num: f64 = value.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = value.denom().to_string().parse().unwrap_or(f64::NAN);
    if num.is_finite() && den.is_finite() {
        return num / den;
    }
    // Very large operands: scale both down by a common power of ten.
    let n = value.numer().to_string();
    let d = value.denom().to_string();
    let shift = n.trim_start_matches('-').len().max(d.len()).saturating_sub(300);
    let cut = |s: &str| -> f64 {
        let neg = s.starts_with('-');
        let digits = s.trim_start_matches('-');
        let keep = digits.len().saturating_sub(shift);
        let v: f64 = if keep == 0 { 0.0 } else { digits[..keep].parse().unwrap_or(0.0) };
        if neg {
            -v
        } else {
            v
        }
    };
    cut(&n) / cut(&d)
}

/// A rational that is known to be strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosRational(Rational);

impl PosRational {
    pub fn new(name: &'static str, value: Rational) -> Result<Self, RationalError> {
        if value.is_positive() {
            Ok(Self(value))
        } else {
            Err(RationalError::NotPositive { name, value: value.to_string() })
        }
    }

    pub fn from_integer(name: &'static str, value: i64) -> Result<Self, RationalError> {
        Self::new(name, rational_from_i64(value))
    }

    pub fn one() -> Self {
        Self(Rational::one())
    }

    pub fn get(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for PosRational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new("value", parse_rational(s)?)
    }
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod as_fraction {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        fraction_string(value).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_integer_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("+4/2").unwrap(), q(2, 1));
        assert_eq!(parse_rational("0.000001").unwrap(), q(1, 1_000_000));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "abc", "1/", "/2", "1.2.3", "1e5", "--1", "1.", "3/-"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
        assert!(matches!(parse_rational("1/0"), Err(RationalError::ZeroDenominator(_))));
    }

    #[test]
    fn fraction_string_is_canonical() {
        assert_eq!(fraction_string(&q(4, -6)), "-2/3");
        assert_eq!(fraction_string(&q(5, 1)), "5/1");
        assert_eq!(fraction_string(&q(0, 9)), "0/1");
    }

    #[test]
    fn positive_newtype_rejects_zero_and_negative() {
        assert!(PosRational::new("t", q(0, 1)).is_err());
        assert!(PosRational::new("t", q(-1, 3)).is_err());
        assert_eq!(PosRational::new("t", q(1, 3)).unwrap().get(), &q(1, 3));
    }

    #[test]
    fn float_display_conversion() {
        assert_eq!(to_f64(&q(1, 4)), 0.25);
        let huge = Rational::new(BigInt::from(10u32).pow(400), BigInt::from(3u32) * BigInt::from(10u32).pow(399));
        assert!((to_f64(&huge) - 10.0 / 3.0).abs() < 1e-9);
    }
}
