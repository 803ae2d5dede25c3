//! Walls along the hyperbola, Chern-level destabilizer search under the
//! asymptotic phase order, and a pointwise cross-check of that order.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::charges::{reduced_charge, tilt_slope, ReducedCharge};
use crate::lattice::{ChernMatrix, GeometryParams, Polarization};
use crate::laurent::{LaurentPoly, PositiveRoot};
use crate::phases::{phase_compare, PhaseError, PhaseOrder};
use crate::rational::{self, rational_from_i64, PosRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("no wall: proportional phases")]
    ProportionalPhases,
    #[error("no wall: both charges vanish identically")]
    BothChargesZero,
    #[error("empty search box: lower bound {lo} exceeds upper bound {hi} in entry {entry}")]
    EmptyBox { entry: usize, lo: i64, hi: i64 },
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// `1 + ` the largest Cauchy bound among the nonzero polynomials: beyond it
/// none of them changes sign.
fn threshold<'a>(polys: impl IntoIterator<Item = &'a LaurentPoly>) -> Rational {
    let top = polys.into_iter().filter_map(LaurentPoly::cauchy_bound).max().unwrap_or_else(Rational::one);
    Rational::one() + top
}

fn safe_threshold(a: &ReducedCharge, e: &ReducedCharge, cross: &LaurentPoly) -> Rational {
    threshold([cross, &a.re, &e.re, &a.im, &e.im])
}

/// Positive `s` where the phases of `A` and `E` cross or touch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallReport {
    pub a: ChernMatrix,
    pub e: ChernMatrix,
    pub cross: LaurentPoly,
    pub roots: Vec<PositiveRoot>,
    /// Beyond this value neither the cross polynomial nor any component of
    /// either charge changes sign, so the pointwise order is frozen.
    #[serde(with = "rational::as_fraction")]
    pub safe_s: Rational,
    /// Set when one charge vanishes: its phase is constantly `1/2`.
    pub zero_charge: Option<char>,
}

pub fn wall_locus(
    a: &ChernMatrix,
    e: &ChernMatrix,
    alpha: &PosRational,
    geo: &GeometryParams,
) -> Result<WallReport, StabilityError> {
    let (za, ze) = (reduced_charge(a, alpha, geo), reduced_charge(e, alpha, geo));
    let zero_charge = match (za.is_zero(), ze.is_zero()) {
        (true, true) => return Err(StabilityError::BothChargesZero),
        (true, false) => Some('A'),
        (false, true) => Some('E'),
        (false, false) => None,
    };
    let cross = za.cross(&ze);
    if cross.is_zero() && zero_charge.is_none() {
        return Err(StabilityError::ProportionalPhases);
    }
    let roots = if cross.is_zero() { Vec::new() } else { cross.positive_roots().expect("nonzero") };
    let safe_s = safe_threshold(&za, &ze, &cross);
    Ok(WallReport { a: *a, e: *e, cross, roots, safe_s, zero_charge })
}

/// Inclusive per-entry bounds for candidate subobjects, plus which heart
/// conditions to impose.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchBox {
    lo: [i64; 6],
    hi: [i64; 6],
    pub filter_candidate: bool,
    pub filter_complement: bool,
}

impl SearchBox {
    pub fn new(lo: [i64; 6], hi: [i64; 6]) -> Result<Self, StabilityError> {
        if let Some(entry) = (0..6).find(|&k| lo[k] > hi[k]) {
            return Err(StabilityError::EmptyBox { entry, lo: lo[entry], hi: hi[entry] });
        }
        Ok(Self { lo, hi, filter_candidate: true, filter_complement: true })
    }

    pub fn uniform(lo: i64, hi: i64) -> Result<Self, StabilityError> {
        Self::new([lo; 6], [hi; 6])
    }

    /// `[min(0, e) − budget, max(0, e) + budget]` in each entry.
    pub fn around(e: &ChernMatrix, budget: i64) -> Self {
        let f = e.flat();
        let lo = f.map(|v| v.min(0) - budget);
        let hi = f.map(|v| v.max(0) + budget);
        Self::new(lo, hi).expect("well-ordered")
    }

    pub fn with_filters(mut self, candidate: bool, complement: bool) -> Self {
        self.filter_candidate = candidate;
        self.filter_complement = complement;
        self
    }

    pub fn lo(&self) -> [i64; 6] {
        self.lo
    }

    pub fn hi(&self) -> [i64; 6] {
        self.hi
    }

    pub fn volume(&self) -> u128 {
        (0..6).map(|k| (self.hi[k] - self.lo[k] + 1) as u128).product()
    }

    pub fn contains(&self, m: &ChernMatrix) -> bool {
        m.flat().iter().enumerate().all(|(k, v)| (self.lo[k]..=self.hi[k]).contains(v))
    }

    /// All matrices in the box whose first entry is `first`, in
    /// lexicographic order.
    fn slice(&self, first: i64) -> impl Iterator<Item = ChernMatrix> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        (lo[1]..=hi[1]).flat_map(move |b| {
            (lo[2]..=hi[2]).flat_map(move |c| {
                (lo[3]..=hi[3]).flat_map(move |d| {
                    (lo[4]..=hi[4])
                        .flat_map(move |e| (lo[5]..=hi[5]).map(move |f| ChernMatrix::from_flat([first, b, c, d, e, f])))
                })
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `φ(A) ≻ φ(E)` for large `s`.
    Strict,
    /// `φ(A) = φ(E)` as functions for large `s`.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub matrix: ChernMatrix,
    pub verdict: Verdict,
}

/// Chern-level heart conditions: `a10 ≥ 0` and an admissible charge.
pub fn passes_heart_filter(m: &ChernMatrix, alpha: &PosRational, geo: &GeometryParams) -> bool {
    m.a10() >= 0 && reduced_charge(m, alpha, geo).is_admissible()
}

/// Every proper, nonzero `A` in the box that passes the enabled heart
/// filters (on `A` and on `E − A`) and whose phase eventually reaches that
/// of `E`. Sorted lexicographically by entries. An empty result only says
/// no Chern class in the box destabilizes; it proves nothing about `E`.
pub fn destabilizer_search(
    e: &ChernMatrix,
    search: &SearchBox,
    alpha: &PosRational,
    geo: &GeometryParams,
) -> Result<Vec<Candidate>, StabilityError> {
    let ze = reduced_charge(e, alpha, geo);
    phase_compare(&ze, &ze)?;
    let mut found: Vec<Candidate> = (search.lo[0]..=search.hi[0])
        .into_par_iter()
        .flat_map_iter(|first| {
            let ze = &ze;
            search.slice(first).filter_map(move |a| {
                if a.is_zero() || a == *e {
                    return None;
                }
                if search.filter_candidate && !passes_heart_filter(&a, alpha, geo) {
                    return None;
                }
                if search.filter_complement && !passes_heart_filter(&(*e - a), alpha, geo) {
                    return None;
                }
                let za = reduced_charge(&a, alpha, geo);
                let verdict = match phase_compare(&za, ze) {
                    Ok(PhaseOrder::Succeeds) => Verdict::Strict,
                    Ok(PhaseOrder::EqualAsFunctions) => Verdict::Boundary,
                    _ => return None,
                };
                Some(Candidate { matrix: a, verdict })
            })
        })
        .collect();
    found.sort_by(|x, y| x.matrix.flat().cmp(&y.matrix.flat()));
    Ok(found)
}

/// A destabilizer with the walls it shares with `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub matrix: ChernMatrix,
    pub verdict: Verdict,
    pub roots: Vec<PositiveRoot>,
    #[serde(with = "rational::as_fraction")]
    pub safe_s: Rational,
}

pub fn candidate_reports(
    e: &ChernMatrix,
    candidates: &[Candidate],
    alpha: &PosRational,
    geo: &GeometryParams,
) -> Vec<CandidateReport> {
    candidates
        .iter()
        .map(|c| {
            let (roots, safe_s) = walls_or_threshold(&c.matrix, e, alpha, geo);
            CandidateReport { matrix: c.matrix, verdict: c.verdict, roots, safe_s }
        })
        .collect()
}

/// A point beyond which the pointwise phase order of `A` and `E` no longer
/// changes, defined even when the pair has no wall.
pub fn pair_safe_s(a: &ChernMatrix, e: &ChernMatrix, alpha: &PosRational, geo: &GeometryParams) -> Rational {
    walls_or_threshold(a, e, alpha, geo).1
}

/// Wall roots and safe threshold, falling back to the component threshold
/// when there is no wall to speak of.
fn walls_or_threshold(
    a: &ChernMatrix,
    e: &ChernMatrix,
    alpha: &PosRational,
    geo: &GeometryParams,
) -> (Vec<PositiveRoot>, Rational) {
    match wall_locus(a, e, alpha, geo) {
        Ok(report) => (report.roots, report.safe_s),
        Err(_) => {
            let (za, ze) = (reduced_charge(a, alpha, geo), reduced_charge(e, alpha, geo));
            let cross = za.cross(&ze);
            (Vec::new(), safe_threshold(&za, &ze, &cross))
        }
    }
}

/// Order of `ν_ω(A)` against `ν_ω(E)` at `ω = (α/s)H + sD`, with `+∞`
/// whenever `ω²ch₁ = 0`.
pub fn pointwise_tilt_order(
    a: &ChernMatrix,
    e: &ChernMatrix,
    alpha: &PosRational,
    s: &PosRational,
    geo: &GeometryParams,
) -> PhaseOrder {
    let pol = Polarization::on_hyperbola(alpha, s);
    PhaseOrder::from_ordering(tilt_slope(a, &pol, geo).cmp(&tilt_slope(e, &pol, geo)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleVerdict {
    #[serde(with = "rational::as_fraction")]
    pub s: Rational,
    pub order: PhaseOrder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TiltComparison {
    pub candidate: ChernMatrix,
    pub asymptotic: PhaseOrder,
    #[serde(with = "rational::as_fraction")]
    pub safe_s: Rational,
    pub samples: Vec<SampleVerdict>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TiltReport {
    pub e: ChernMatrix,
    pub comparisons: Vec<TiltComparison>,
}

impl TiltReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &TiltComparison> {
        self.comparisons.iter().filter(|c| !c.agrees)
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements().next().is_none()
    }
}

/// Evaluates `ν_ω(A)` against `ν_ω(E)` at `safe_s·2ᵏ`, `k = 1..=samples`,
/// and records whether each matches the asymptotic phase order. Any
/// disagreement is a defect in this crate, not a mathematical finding.
pub fn tilt_vs_limit_check(
    e: &ChernMatrix,
    candidates: &[ChernMatrix],
    alpha: &PosRational,
    geo: &GeometryParams,
    samples: u32,
) -> Result<TiltReport, StabilityError> {
    let ze = reduced_charge(e, alpha, geo);
    let comparisons = candidates
        .iter()
        .map(|a| {
            let za = reduced_charge(a, alpha, geo);
            let asymptotic = phase_compare(&za, &ze)?;
            let (_, safe_s) = walls_or_threshold(a, e, alpha, geo);
            let samples: Vec<SampleVerdict> = (1..=samples)
                .map(|k| {
                    let s = &safe_s * rational_from_i64(1i64 << k.min(62));
                    let sp = PosRational::new("s", s.clone()).expect("positive sample");
                    SampleVerdict { order: pointwise_tilt_order(a, e, alpha, &sp, geo), s }
                })
                .collect();
            let agrees = samples.iter().all(|v| v.order == asymptotic);
            Ok(TiltComparison { candidate: *a, asymptotic, safe_s, samples, agrees })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;
    Ok(TiltReport { e: *e, comparisons })
}

/// Sign of the cross polynomial at `s`, exposed for plotting and tests.
pub fn cross_sign_at(report: &WallReport, s: &Rational) -> Ordering {
    report.cross.eval(s).map(|v| v.cmp(&Rational::zero())).unwrap_or(Ordering::Equal)
}
