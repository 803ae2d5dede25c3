//! Exact Laurent polynomials in one variable `s` over `Q`.
//!
//! Central charges along the hyperbola `ts = α` are Laurent polynomials in
//! `s` because `t = α s⁻¹`. The questions asked of them are all about large
//! `s`: the eventual sign ([`LaurentPoly::asymptotic_sign`]) and where the
//! sign can still change ([`LaurentPoly::positive_roots`]).

mod dense;
mod roots;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{fraction_string, parse_rational, Rational};
use dense::DensePoly;
pub use roots::{PositiveRoot, RootLocation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("evaluation point must be positive, got {0}")]
    NonPositivePoint(String),
    #[error("the zero polynomial vanishes at every point; no roots to isolate")]
    ZeroPolynomial,
    #[error("root isolation width must be positive, got {0}")]
    NonPositiveWidth(String),
    #[error("malformed Laurent polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Finitely supported map from exponent to nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(coeff: Rational, exponent: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    /// Sums the given terms; repeated exponents accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Rational)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exponent: i32, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().rev().map(|(e, c)| (*e, c))
    }

    pub fn coefficient(&self, exponent: i32) -> Rational {
        self.terms.get(&exponent).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    /// Exact value at `s0 > 0`.
    pub fn eval(&self, s0: &Rational) -> Result<Rational, LaurentError> {
        if !s0.is_positive() {
            return Err(LaurentError::NonPositivePoint(s0.to_string()));
        }
        Ok(self.terms.iter().fold(Rational::zero(), |acc, (e, c)| acc + c * pow(s0, *e)))
    }

    /// Sign of the leading coefficient, which is the sign of the polynomial
    /// for every sufficiently large `s`.
    pub fn asymptotic_sign(&self) -> Ordering {
        match self.leading_coefficient() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    /// Multiplies by `s^k` so the lowest exponent becomes zero; returns the
    /// resulting ordinary polynomial. Positive roots are unchanged.
    fn cleared(&self) -> Option<DensePoly> {
        let low = self.low_degree()?;
        let high = self.degree()?;
        let mut coeffs = vec![Rational::zero(); (high - low) as usize + 1];
        for (e, c) in &self.terms {
            coeffs[(e - low) as usize] = c.clone();
        }
        Some(DensePoly::new(coeffs))
    }

    /// A rational `S ≥ 1` such that the sign of the polynomial at every
    /// `s > S` equals [`Self::asymptotic_sign`]. `None` for the zero polynomial.
    pub fn cauchy_bound(&self) -> Option<Rational> {
        self.cleared().map(|p| roots::cauchy_bound(&p))
    }

    /// All roots in `(0, ∞)`, ascending, with isolating intervals no wider
    /// than `10⁻⁶`.
    pub fn positive_roots(&self) -> Result<Vec<PositiveRoot>, LaurentError> {
        self.positive_roots_with_width(&Rational::new(1.into(), 1_000_000.into()))
    }

    pub fn positive_roots_with_width(&self, width: &Rational) -> Result<Vec<PositiveRoot>, LaurentError> {
        if !width.is_positive() {
            return Err(LaurentError::NonPositiveWidth(width.to_string()));
        }
        let p = self.cleared().ok_or(LaurentError::ZeroPolynomial)?;
        Ok(roots::isolate_positive_roots(&p, width))
    }
}

fn pow(base: &Rational, exponent: i32) -> Rational {
    let magnitude = num_traits::pow(base.clone(), exponent.unsigned_abs() as usize);
    if exponent < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// Canonical text: `c*s^e` terms in descending exponent joined by ` + `,
/// with `c` in lowest terms (`p` or `p/q`); the zero polynomial is `0`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*s^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Accepts the canonical form plus the shorthands `c`, `s`, `s^e`,
    /// `c*s` and `c s^e`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| LaurentError::Parse { input: input.to_string(), reason };
        let trimmed = input.trim();
        if trimmed.is_empty() {
            return Err(fail("empty input".into()));
        }
        let mut out = LaurentPoly::zero();
        for raw in trimmed.split('+') {
            let term: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            if term.is_empty() {
                return Err(fail("empty term".into()));
            }
            let (coeff_text, power_text) = match term.find('s') {
                None => (term.as_str(), None),
                Some(pos) => {
                    let coeff = term[..pos].trim_end_matches('*');
                    (coeff, Some(&term[pos + 1..]))
                }
            };
            let coeff = match coeff_text {
                "" => Rational::one(),
                "-" => -Rational::one(),
                text => parse_rational(text).map_err(|e| fail(e.to_string()))?,
            };
            let exponent = match power_text {
                None => 0,
                Some("") => 1,
                Some(rest) => {
                    let digits = rest.strip_prefix('^').ok_or_else(|| fail(format!("bad power {rest:?}")))?;
                    digits.parse::<i32>().map_err(|_| fail(format!("bad exponent {digits:?}")))?
                }
            };
            out.add_term(exponent, coeff);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentJson {
    terms: Vec<(i32, String)>,
}

/// JSON form `{"terms": [[e, "p/q"], ...]}`, descending in `e`.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LaurentJson { terms: self.terms().map(|(e, c)| (e, fraction_string(c))).collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = LaurentJson::deserialize(deserializer)?;
        let mut out = LaurentPoly::zero();
        for (e, text) in raw.terms {
            if out.terms.contains_key(&e) {
                return Err(D::Error::custom(format!("duplicate exponent {e}")));
            }
            let c = parse_rational(&text).map_err(D::Error::custom)?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}
