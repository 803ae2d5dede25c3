//! Certified isolation of the positive real roots of a Laurent polynomial.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dense::{sign_variations, DensePoly};
use crate::rational::{self, Rational};

/// Where a certified root sits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootLocation {
    Exact(#[serde(with = "rational::as_fraction")] Rational),
    /// Open interval `(lo, hi)` holding exactly one root; the square-free
    /// part of the polynomial has opposite nonzero signs at the endpoints.
    Interval {
        #[serde(with = "rational::as_fraction")]
        lo: Rational,
        #[serde(with = "rational::as_fraction")]
        hi: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveRoot {
    #[serde(flatten)]
    pub location: RootLocation,
    pub multiplicity: u32,
}

impl PositiveRoot {
    /// A rational `≤` the root.
    pub fn lower(&self) -> &Rational {
        match &self.location {
            RootLocation::Exact(r) => r,
            RootLocation::Interval { lo, .. } => lo,
        }
    }

    /// A rational `≥` the root.
    pub fn upper(&self) -> &Rational {
        match &self.location {
            RootLocation::Exact(r) => r,
            RootLocation::Interval { hi, .. } => hi,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.location, RootLocation::Exact(_))
    }

    /// Midpoint approximation for display.
    pub fn approx(&self) -> f64 {
        rational::to_f64(&((self.lower() + self.upper()) / Rational::from_integer(2.into())))
    }
}

/// Cauchy bound `1 + max |a_k / a_n|`; every complex root has modulus
/// strictly below it.
pub(crate) fn cauchy_bound(p: &DensePoly) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let n = p.coeffs().len() - 1;
    let max = p.coeffs()[..n].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
    Rational::one() + max
}

struct Isolator {
    chain: Vec<DensePoly>,
    poly: DensePoly,
}

impl Isolator {
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        sign_variations(&self.chain, lo) - sign_variations(&self.chain, hi)
    }

    /// Collects roots in `(lo, hi)`; endpoints are never roots.
    fn isolate(&self, lo: Rational, hi: Rational, count: usize, out: &mut Vec<RootLocation>) {
        if count == 0 {
            return;
        }
        if count == 1 {
            out.push(RootLocation::Interval { lo, hi });
            return;
        }
        let two = Rational::from_integer(2.into());
        let mid = (&lo + &hi) / &two;
        if self.poly.sign_at(&mid) != 0 {
            let left = self.count(&lo, &mid);
            self.isolate(lo, mid.clone(), left, out);
            self.isolate(mid, hi, count - left, out);
            return;
        }
        // Split point is itself a root: carve out a clean neighbourhood.
        let mut delta = (&hi - &lo) / Rational::from_integer(4.into());
        loop {
            let a = &mid - &delta;
            let b = &mid + &delta;
            if self.poly.sign_at(&a) != 0 && self.poly.sign_at(&b) != 0 && self.count(&a, &b) == 1 {
                let left = self.count(&lo, &a);
                out.push(RootLocation::Exact(mid.clone()));
                self.isolate(lo, a, left, out);
                self.isolate(b, hi, count - left - 1, out);
                return;
            }
            delta /= &two;
        }
    }

    /// Shrinks an isolating interval below `width`, or lands on the root.
    fn refine(&self, location: RootLocation, width: &Rational) -> RootLocation {
        let RootLocation::Interval { mut lo, mut hi } = location else {
            return location;
        };
        let two = Rational::from_integer(2.into());
        let lo_sign = self.poly.sign_at(&lo);
        loop {
            let candidate = simplest_between(&lo, Some(&hi));
            if self.poly.sign_at(&candidate) == 0 {
                return RootLocation::Exact(candidate);
            }
            if &(&hi - &lo) <= width {
                break;
            }
            let mid = (&lo + &hi) / &two;
            match self.poly.sign_at(&mid) {
                0 => return RootLocation::Exact(mid),
                s if s == lo_sign => lo = mid,
                _ => hi = mid,
            }
        }
        RootLocation::Interval { lo, hi }
    }
}

/// The rational with the smallest denominator (then numerator) in the open
/// interval `(lo, hi)`, `hi = None` meaning `+∞`; requires `lo ≥ 0`.
fn simplest_between(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let floor = lo.floor();
    let next = &floor + Rational::one();
    match hi {
        Some(hi) if &next >= hi => {
            let frac_lo = lo - &floor;
            let inner_lo = (hi - &floor).recip();
            let inner_hi = if frac_lo.is_zero() { None } else { Some(frac_lo.recip()) };
            floor + simplest_between(&inner_lo, inner_hi.as_ref()).recip()
        }
        _ => next,
    }
}

/// Positive roots of `p` (dense, nonzero, `p(0) ≠ 0`), ascending, refined to
/// `width`, with multiplicities from the square-free decomposition.
pub(crate) fn isolate_positive_roots(p: &DensePoly, width: &Rational) -> Vec<PositiveRoot> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let factors = p.squarefree_decomposition();
    let squarefree = factors.iter().fold(DensePoly::one(), |acc, (f, _)| {
        let mut out = vec![Rational::zero(); acc.coeffs().len() + f.coeffs().len() - 1];
        for (i, x) in acc.coeffs().iter().enumerate() {
            for (j, y) in f.coeffs().iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        DensePoly::new(out)
    });
    let isolator = Isolator { chain: squarefree.sturm_chain(), poly: squarefree };
    let lo = Rational::zero();
    let hi = cauchy_bound(&isolator.poly);
    let total = isolator.count(&lo, &hi);

    let mut found = Vec::new();
    isolator.isolate(lo, hi, total, &mut found);
    let mut roots: Vec<PositiveRoot> = found
        .into_iter()
        .map(|loc| {
            let location = isolator.refine(loc, width);
            let multiplicity = multiplicity_of(&factors, &location);
            PositiveRoot { location, multiplicity }
        })
        .collect();
    roots.sort_by(|a, b| a.lower().cmp(b.lower()));
    roots
}

fn multiplicity_of(factors: &[(DensePoly, u32)], location: &RootLocation) -> u32 {
    factors
        .iter()
        .find(|(f, _)| match location {
            RootLocation::Exact(r) => f.eval(r).is_zero(),
            RootLocation::Interval { lo, hi } => f.sign_at(lo) * f.sign_at(hi) < 0,
        })
        .map(|(_, k)| *k)
        .expect("every isolated root belongs to one square-free factor")
}
