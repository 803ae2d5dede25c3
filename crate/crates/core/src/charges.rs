//! Slope functions and central charges attached to a Chern matrix.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lattice::{intersection_numbers, ChernMatrix, GeometryParams, Polarization};
use crate::laurent::LaurentPoly;
use crate::rational::{self, rational_from_i64, PosRational, Rational};

/// A rational number or `+∞`; `+∞` sorts above every rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedRational {
    Finite(Rational),
    PosInfinity,
}

impl ExtendedRational {
    /// `num / den`, or `+∞` when `den = 0`.
    pub fn ratio(num: Rational, den: Rational) -> Self {
        if den.is_zero() {
            Self::PosInfinity
        } else {
            Self::Finite(num / den)
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::PosInfinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Self::Finite(v) => Some(v),
            Self::PosInfinity => None,
        }
    }

    /// `"p/q"` or `"+inf"`.
    pub fn fraction_string(&self) -> String {
        match self {
            Self::Finite(v) => rational::fraction_string(v),
            Self::PosInfinity => "+inf".to_string(),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => v.fmt(f),
            Self::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.fraction_string().serialize(serializer)
    }
}

/// An exact complex number `re + i·im`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexRational {
    #[serde(with = "rational::as_fraction")]
    pub re: Rational,
    #[serde(with = "rational::as_fraction")]
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }
}

/// `μ_f = a10 / a00`.
pub fn slope_mu_f(m: &ChernMatrix) -> ExtendedRational {
    ExtendedRational::ratio(rational_from_i64(m.a10()), rational_from_i64(m.a00()))
}

/// `μ* = a01 / a00`.
pub fn slope_mu_star(m: &ChernMatrix) -> ExtendedRational {
    ExtendedRational::ratio(rational_from_i64(m.a01()), rational_from_i64(m.a00()))
}

/// `μ_ω = ω²ch₁ / ch₀`.
pub fn slope_mu_omega(m: &ChernMatrix, pol: &Polarization, geo: &GeometryParams) -> ExtendedRational {
    let n = intersection_numbers(m, pol, geo);
    ExtendedRational::ratio(n.omega2_ch1, n.ch0)
}

/// `ν_ω = (ωch₂ − ω³ch₀/6) / ω²ch₁`, `+∞` when the denominator vanishes.
pub fn tilt_slope(m: &ChernMatrix, pol: &Polarization, geo: &GeometryParams) -> ExtendedRational {
    let n = intersection_numbers(m, pol, geo);
    ExtendedRational::ratio(n.tilt_numerator(), n.omega2_ch1)
}

/// `Z_{μω} = −ω²ch₁ + i·ch₀`.
pub fn z_slope(m: &ChernMatrix, pol: &Polarization, geo: &GeometryParams) -> ComplexRational {
    let n = intersection_numbers(m, pol, geo);
    ComplexRational::new(-n.omega2_ch1, n.ch0)
}

/// `Z_α = a10 + i(2a11 − α·a00)`.
pub fn z_alpha(m: &ChernMatrix, alpha: &PosRational) -> ComplexRational {
    let im = rational_from_i64(2 * m.a11()) - alpha.get() * rational_from_i64(m.a00());
    ComplexRational::new(rational_from_i64(m.a10()), im)
}

/// `(ω²ch₁)² − 2ω³ch₀·ωch₂`.
pub fn discriminant(m: &ChernMatrix, pol: &Polarization, geo: &GeometryParams) -> Rational {
    let n = intersection_numbers(m, pol, geo);
    &n.omega2_ch1 * &n.omega2_ch1 - rational_from_i64(2) * &n.omega3 * &n.ch0 * &n.omega_ch2
}

/// Both sides of the identity `ω̄²ch₁(E) = 2h(λ²/α)(2b11 − α·b00)` where
/// `ω̄ = (λ/α)H + λD` and `b = ch(ΦE[1])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Eq12Sides {
    #[serde(with = "rational::as_fraction")]
    pub lhs: Rational,
    #[serde(with = "rational::as_fraction")]
    pub rhs: Rational,
}

impl Eq12Sides {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn eq12_sides(m: &ChernMatrix, alpha: &PosRational, lambda: &PosRational, geo: &GeometryParams) -> Eq12Sides {
    let lhs = intersection_numbers(m, &Polarization::reference(alpha, lambda), geo).omega2_ch1;
    let b = m.fm_transform().shift(1);
    let (a, l) = (alpha.get(), lambda.get());
    let rhs = rational_from_i64(2) * geo.h_rational() * l * l / a
        * (rational_from_i64(2 * b.a11()) - a * rational_from_i64(b.a00()));
    Eq12Sides { lhs, rhs }
}

pub fn eq12_check(m: &ChernMatrix, alpha: &PosRational, lambda: &PosRational, geo: &GeometryParams) -> bool {
    eq12_sides(m, alpha, lambda, geo).holds()
}

/// The reduced central charge along `ts = α`, as Laurent polynomials in `s`:
/// `re = 2hα·a01 + h·a10·s²`, `im = α·a02·s⁻¹ + (2h·a11 − hα·a00)·s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCharge {
    pub re: LaurentPoly,
    pub im: LaurentPoly,
    pub alpha: PosRational,
    pub h: i64,
}

/// Which sign condition of the admissible region a charge violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inadmissibility {
    /// `Re` is eventually negative.
    NegativeRe,
    /// `Re ≡ 0` and `Im` is eventually negative.
    NegativeIm,
}

impl fmt::Display for Inadmissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeRe => f.write_str("real part is eventually negative"),
            Self::NegativeIm => f.write_str("real part vanishes and imaginary part is eventually negative"),
        }
    }
}

impl ReducedCharge {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `None` when the charge lies in `{Re > 0} ∪ {Re = 0, Im ≥ 0}` for all
    /// large `s`.
    pub fn admissibility(&self) -> Option<Inadmissibility> {
        match self.re.asymptotic_sign() {
            Ordering::Less => Some(Inadmissibility::NegativeRe),
            Ordering::Greater => None,
            Ordering::Equal if self.im.asymptotic_sign() == Ordering::Less => Some(Inadmissibility::NegativeIm),
            Ordering::Equal => None,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().is_none()
    }

    /// `Im(self)·Re(other) − Im(other)·Re(self)`: positive exactly where the
    /// phase of `self` exceeds that of `other` (both in the right half-plane).
    pub fn cross(&self, other: &ReducedCharge) -> LaurentPoly {
        &(&self.im * &other.re) - &(&other.im * &self.re)
    }

    /// Pointwise value at `s0 > 0`.
    pub fn at(&self, s0: &PosRational) -> ComplexRational {
        let re = self.re.eval(s0.get()).expect("positive point");
        let im = self.im.eval(s0.get()).expect("positive point");
        ComplexRational::new(re, im)
    }
}

pub fn reduced_charge(m: &ChernMatrix, alpha: &PosRational, geo: &GeometryParams) -> ReducedCharge {
    let h = geo.h_rational();
    let a = alpha.get();
    let q = rational_from_i64;
    let re = LaurentPoly::from_terms([(0, q(2) * &h * a * q(m.a01())), (2, &h * q(m.a10()))]);
    let im = LaurentPoly::from_terms([
        (-1, a * q(m.a02())),
        (1, q(2) * &h * q(m.a11()) - &h * a * q(m.a00())),
    ]);
    ReducedCharge { re, im, alpha: alpha.clone(), h: geo.h() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        rational_from_i64(n)
    }

    fn qq(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pos(n: i64, d: i64) -> PosRational {
        PosRational::new("x", qq(n, d)).unwrap()
    }

    fn m(top: [i64; 3], bottom: [i64; 3]) -> ChernMatrix {
        ChernMatrix::from_rows(top, bottom)
    }

    fn unit() -> (Polarization, GeometryParams) {
        (Polarization::new(q(1), q(1)).unwrap(), GeometryParams::with_h(1).unwrap())
    }

    fn fin(v: Rational) -> ExtendedRational {
        ExtendedRational::Finite(v)
    }

    #[test]
    fn simple_slopes() {
        assert_eq!(slope_mu_f(&m([1, 0, 0], [0, 0, 0])), fin(q(0)));
        assert_eq!(slope_mu_f(&m([0, 0, 0], [1, 0, 0])), ExtendedRational::PosInfinity);
        assert_eq!(slope_mu_f(&m([2, 0, 0], [-1, 0, 0])), fin(qq(-1, 2)));
        assert_eq!(slope_mu_star(&m([1, 3, 0], [0, 0, 0])), fin(q(3)));
        assert_eq!(slope_mu_star(&m([0, 1, 0], [0, 0, 0])), ExtendedRational::PosInfinity);
        assert_eq!(slope_mu_star(&m([-2, 1, 0], [0, 0, 0])), fin(qq(-1, 2)));
    }

    #[test]
    fn omega_slopes() {
        let (pol, geo) = unit();
        assert_eq!(slope_mu_omega(&m([1, 1, 0], [0, 0, 0]), &pol, &geo), fin(q(4)));
        assert_eq!(slope_mu_omega(&m([1, 0, 0], [1, 0, 0]), &pol, &geo), fin(q(2)));
        assert!(slope_mu_omega(&m([0, 0, 0], [0, 1, 0]), &pol, &geo).is_infinite());
        assert_eq!(tilt_slope(&m([0, 1, 0], [0, 0, 0]), &pol, &geo), fin(q(0)));
        assert!(tilt_slope(&m([0, 0, 0], [0, 1, 0]), &pol, &geo).is_infinite());
        assert_eq!(tilt_slope(&m([0, 0, 1], [1, 0, 0]), &pol, &geo), fin(qq(1, 2)));
        assert!(tilt_slope(&ChernMatrix::ZERO, &pol, &geo).is_infinite());
    }

    #[test]
    fn infinity_sorts_last() {
        assert!(ExtendedRational::PosInfinity > fin(q(1_000_000)));
        assert!(fin(q(-3)) < fin(q(2)));
    }

    #[test]
    fn reduced_charge_examples() {
        let geo = GeometryParams::with_h(1).unwrap();
        let one = PosRational::one();
        let z = reduced_charge(&m([-1, 0, 0], [0, 0, 0]), &one, &geo);
        assert!(z.re.is_zero());
        assert_eq!(z.im, LaurentPoly::monomial(q(1), 1));
        assert!(reduced_charge(&ChernMatrix::point(), &one, &geo).is_zero());
        let z = reduced_charge(&m([0, 0, 1], [1, 0, 0]), &one, &geo);
        assert_eq!(z.re, LaurentPoly::monomial(q(1), 2));
        assert_eq!(z.im, LaurentPoly::monomial(q(1), -1));
    }

    #[test]
    fn central_charge_pairs() {
        let (pol, geo) = unit();
        assert_eq!(z_slope(&m([1, 0, 0], [0, 0, 0]), &pol, &geo), ComplexRational::new(q(0), q(1)));
        assert_eq!(z_slope(&m([1, 1, 0], [0, 0, 0]), &pol, &geo), ComplexRational::new(q(-4), q(1)));
        assert_eq!(z_slope(&ChernMatrix::point(), &pol, &geo), ComplexRational::new(q(0), q(0)));
        let phi_ox_shift = ChernMatrix::structure_sheaf().fm_transform().shift(1);
        assert_eq!(z_alpha(&phi_ox_shift, &PosRational::one()), ComplexRational::new(q(1), q(0)));
        assert_eq!(z_alpha(&m([1, 0, 0], [0, 0, 0]), &pos(2, 1)), ComplexRational::new(q(0), q(-2)));
        assert_eq!(z_alpha(&ChernMatrix::point(), &pos(7, 3)), ComplexRational::new(q(0), q(0)));
    }

    #[test]
    fn eq12_examples() {
        let geo = GeometryParams::with_h(1).unwrap();
        let one = PosRational::one();
        let s = eq12_sides(&m([1, 0, 0], [0, 0, 0]), &one, &one, &geo);
        assert_eq!((s.lhs.clone(), s.rhs.clone()), (q(0), q(0)));
        let s = eq12_sides(&m([1, 1, 0], [0, 0, 0]), &one, &one, &geo);
        assert_eq!((s.lhs.clone(), s.rhs.clone()), (q(4), q(4)));
        let geo2 = GeometryParams::with_h(2).unwrap();
        assert!(eq12_check(&m([2, -1, 3], [5, 7, -4]), &pos(3, 1), &pos(2, 1), &geo2));
    }

    #[test]
    fn discriminant_examples() {
        let (pol, geo) = unit();
        assert_eq!(discriminant(&ChernMatrix::structure_sheaf(), &pol, &geo), q(0));
        assert_eq!(discriminant(&ChernMatrix::point(), &pol, &geo), q(0));
        assert_eq!(discriminant(&m([0, 1, 0], [0, 0, 0]), &pol, &geo), q(16));
    }

    #[test]
    fn admissibility_signs() {
        let geo = GeometryParams::with_h(1).unwrap();
        let one = PosRational::one();
        let z = |top, bottom| reduced_charge(&m(top, bottom), &one, &geo);
        assert_eq!(z([0, 0, 0], [-1, 0, 0]).admissibility(), Some(Inadmissibility::NegativeRe));
        assert_eq!(z([1, 0, 0], [0, 0, 0]).admissibility(), Some(Inadmissibility::NegativeIm));
        assert!(z([-1, 0, 0], [0, 0, 0]).is_admissible());
        assert!(z([0, 0, 0], [0, 0, 1]).is_admissible());
        assert!(z([1, 1, 0], [0, 0, 0]).is_admissible());
    }

    fn matrix() -> impl Strategy<Value = ChernMatrix> {
        proptest::array::uniform6(-30i64..=30).prop_map(ChernMatrix::from_flat)
    }

    fn posq() -> impl Strategy<Value = PosRational> {
        (1i64..=12, 1i64..=12).prop_map(|(n, d)| pos(n, d))
    }

    proptest! {
        #[test]
        fn laurent_charge_matches_pointwise(mm in matrix(), alpha in posq(), s0 in posq(), h in 1i64..=5) {
            let geo = GeometryParams::with_h(h).unwrap();
            let z = reduced_charge(&mm, &alpha, &geo);
            let pol = Polarization::on_hyperbola(&alpha, &s0);
            let n = intersection_numbers(&mm, &pol, &geo);
            let v = z.at(&s0);
            prop_assert_eq!(v.re, &n.omega2_ch1 / q(2));
            prop_assert_eq!(v.im, n.tilt_numerator());
        }

        #[test]
        fn tilt_slope_is_ratio_of_pointwise_charge(mm in matrix(), alpha in posq(), s0 in posq()) {
            let geo = GeometryParams::with_h(1).unwrap();
            let v = reduced_charge(&mm, &alpha, &geo).at(&s0);
            let pol = Polarization::on_hyperbola(&alpha, &s0);
            let nu = tilt_slope(&mm, &pol, &geo);
            if v.re.is_zero() {
                prop_assert!(nu.is_infinite());
            } else {
                // the charge halves ω²ch₁, so ν = Im / (2 Re)
                prop_assert_eq!(nu, fin(v.im / (q(2) * v.re)));
            }
        }

        #[test]
        fn eq12_always_holds(mm in matrix(), alpha in posq(), lambda in posq(), h in 1i64..=5) {
            prop_assert!(eq12_check(&mm, &alpha, &lambda, &GeometryParams::with_h(h).unwrap()));
        }

        #[test]
        fn slopes_are_scale_invariant(mm in matrix(), k in 1i64..=9, t in posq(), s in posq()) {
            let geo = GeometryParams::with_h(2).unwrap();
            let pol = Polarization::from_positive(t, s);
            let km = mm.scale(k);
            prop_assert_eq!(slope_mu_f(&km), slope_mu_f(&mm));
            prop_assert_eq!(slope_mu_star(&km), slope_mu_star(&mm));
            prop_assert_eq!(slope_mu_omega(&km, &pol, &geo), slope_mu_omega(&mm, &pol, &geo));
            prop_assert_eq!(tilt_slope(&km, &pol, &geo), tilt_slope(&mm, &pol, &geo));
        }
    }
}
