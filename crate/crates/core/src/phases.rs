//! Limits and eventual ordering of the phase function `s ↦ φ(Z̄(s))` as
//! `s → ∞` along the hyperbola.
//!
//! Nothing here touches floating point: every verdict is a sign test on a
//! leading coefficient.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::charges::{Inadmissibility, ReducedCharge};
use crate::laurent::LaurentPoly;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("inadmissible charge{}: {reason}", label.as_ref().map(|l| format!(" {l}")).unwrap_or_default())]
    Inadmissible { label: Option<String>, reason: Inadmissibility },
}

fn check(z: &ReducedCharge, label: Option<&str>) -> Result<(), PhaseError> {
    match z.admissibility() {
        None => Ok(()),
        Some(reason) => Err(PhaseError::Inadmissible { label: label.map(str::to_string), reason }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    ZeroCharge,
    Half,
    MinusHalf,
    Interior,
}

/// Side from which `φ` reaches its limit for large `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    FromAbove,
    Exact,
    FromBelow,
    NotApplicable,
}

/// The exact limit of `φ` as `s → ∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PhaseLimit {
    pub kind: PhaseKind,
    /// For interior limits, `tan(π·φ∞)` as the exact ratio of the leading
    /// coefficients of `Im` and `Re` (zero when `Re` dominates).
    #[serde(serialize_with = "tangent_json")]
    pub tangent: Option<Rational>,
    pub approach: Approach,
}

fn tangent_json<S: serde::Serializer>(value: &Option<Rational>, serializer: S) -> Result<S::Ok, S::Error> {
    value.as_ref().map(rational::fraction_string).serialize(serializer)
}

impl PhaseLimit {
    fn new(kind: PhaseKind, tangent: Option<Rational>, approach: Approach) -> Self {
        Self { kind, tangent, approach }
    }

    /// Floating value of the limit in units of `π`, for display only.
    pub fn approx(&self) -> f64 {
        match self.kind {
            PhaseKind::ZeroCharge | PhaseKind::Half => 0.5,
            PhaseKind::MinusHalf => -0.5,
            PhaseKind::Interior => {
                let t = self.tangent.as_ref().expect("interior limits carry a tangent");
                rational::to_f64(t).atan() / std::f64::consts::PI
            }
        }
    }
}

impl fmt::Display for PhaseLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PhaseKind::ZeroCharge => f.write_str("1/2 (zero charge)"),
            PhaseKind::Half => f.write_str("1/2"),
            PhaseKind::MinusHalf => f.write_str("-1/2"),
            PhaseKind::Interior => {
                let t = self.tangent.as_ref().expect("interior limits carry a tangent");
                if t.is_zero() {
                    f.write_str(match self.approach {
                        Approach::FromAbove => "0+",
                        Approach::FromBelow => "0-",
                        _ => "0",
                    })
                } else {
                    write!(f, "atan2({}, {})/π", t.numer(), t.denom())
                }
            }
        }
    }
}

fn approach_of(sign: Ordering) -> Approach {
    match sign {
        Ordering::Greater => Approach::FromAbove,
        Ordering::Equal => Approach::Exact,
        Ordering::Less => Approach::FromBelow,
    }
}

/// `lim φ` as `s → ∞` for an admissible charge.
pub fn phase_limit(z: &ReducedCharge) -> Result<PhaseLimit, PhaseError> {
    check(z, None)?;
    if z.is_zero() {
        return Ok(PhaseLimit::new(PhaseKind::ZeroCharge, None, Approach::NotApplicable));
    }
    if z.re.is_zero() {
        return Ok(PhaseLimit::new(PhaseKind::Half, None, Approach::Exact));
    }
    let re_deg = z.re.degree().expect("nonzero");
    let re_lead = z.re.leading_coefficient().expect("nonzero");
    match z.im.degree() {
        Some(im_deg) if im_deg > re_deg => {
            if z.im.asymptotic_sign() == Ordering::Greater {
                Ok(PhaseLimit::new(PhaseKind::Half, None, Approach::FromBelow))
            } else {
                Ok(PhaseLimit::new(PhaseKind::MinusHalf, None, Approach::FromAbove))
            }
        }
        Some(im_deg) if im_deg == re_deg => {
            let tangent = z.im.leading_coefficient().expect("nonzero") / re_lead;
            // φ − φ∞ has the sign of Im − tangent·Re once Re > 0.
            let gap = &z.im - &z.re.scale(&tangent);
            Ok(PhaseLimit::new(PhaseKind::Interior, Some(tangent), approach_of(gap.asymptotic_sign())))
        }
        _ => Ok(PhaseLimit::new(PhaseKind::Interior, Some(Rational::zero()), approach_of(z.im.asymptotic_sign()))),
    }
}

/// Eventual order of `φ(A)` against `φ(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseOrder {
    Precedes,
    EqualAsFunctions,
    Succeeds,
}

impl PhaseOrder {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Self::Precedes,
            Ordering::Equal => Self::EqualAsFunctions,
            Ordering::Greater => Self::Succeeds,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Self::Precedes => Self::Succeeds,
            Self::EqualAsFunctions => Self::EqualAsFunctions,
            Self::Succeeds => Self::Precedes,
        }
    }
}

impl fmt::Display for PhaseOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Precedes => "precedes",
            Self::EqualAsFunctions => "equal_as_functions",
            Self::Succeeds => "succeeds",
        })
    }
}

/// An admissible charge whose phase is constantly `1/2`: zero, or `Re ≡ 0`.
pub fn has_maximal_phase(z: &ReducedCharge) -> bool {
    z.re.is_zero()
}

/// Compares the phase functions of `a` and `b` for all sufficiently large `s`.
pub fn phase_compare(a: &ReducedCharge, b: &ReducedCharge) -> Result<PhaseOrder, PhaseError> {
    check(a, Some("A"))?;
    check(b, Some("B"))?;
    Ok(match (has_maximal_phase(a), has_maximal_phase(b)) {
        (true, true) => PhaseOrder::EqualAsFunctions,
        (true, false) => PhaseOrder::Succeeds,
        (false, true) => PhaseOrder::Precedes,
        (false, false) => PhaseOrder::from_ordering(a.cross(b).asymptotic_sign()),
    })
}

/// Pieces of the torsion quadruple an object's charge points into.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "bucket", content = "tangent", rename_all = "snake_case")]
pub enum HnBucket {
    Bullet,
    Half,
    Zero,
    MinusHalf,
    Other(#[serde(with = "rational::as_fraction")] Rational),
}

impl fmt::Display for HnBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bullet => f.write_str("bullet"),
            Self::Half => f.write_str("half"),
            Self::Zero => f.write_str("zero"),
            Self::MinusHalf => f.write_str("minus_half"),
            Self::Other(t) => write!(f, "other (tan = {t})"),
        }
    }
}

pub fn hn_bucket(z: &ReducedCharge) -> Result<HnBucket, PhaseError> {
    let limit = phase_limit(z)?;
    Ok(match limit.kind {
        PhaseKind::ZeroCharge => HnBucket::Bullet,
        PhaseKind::Half => HnBucket::Half,
        PhaseKind::MinusHalf => HnBucket::MinusHalf,
        PhaseKind::Interior => {
            let t = limit.tangent.expect("interior limits carry a tangent");
            if t.is_zero() {
                HnBucket::Zero
            } else {
                HnBucket::Other(t)
            }
        }
    })
}

/// Pointwise phase order at a single `s0` with `φ = 1/2` for charges with
/// vanishing real part; `None` if either value leaves the admissible region.
pub fn pointwise_order(a: &ReducedCharge, b: &ReducedCharge, s0: &Rational) -> Option<PhaseOrder> {
    let value = |p: &LaurentPoly| p.eval(s0).ok();
    let (ra, ia, rb, ib) = (value(&a.re)?, value(&a.im)?, value(&b.re)?, value(&b.im)?);
    let admissible = |r: &Rational, i: &Rational| r.is_positive() || (r.is_zero() && !i.is_negative());
    if !admissible(&ra, &ia) || !admissible(&rb, &ib) {
        return None;
    }
    Some(match (ra.is_zero(), rb.is_zero()) {
        (true, true) => PhaseOrder::EqualAsFunctions,
        (true, false) => PhaseOrder::Succeeds,
        (false, true) => PhaseOrder::Precedes,
        (false, false) => PhaseOrder::from_ordering((&ia * &rb).cmp(&(&ib * &ra))),
    })
}
