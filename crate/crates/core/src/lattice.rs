//! Chern-character matrices on `X = C × S` and the cohomological
//! Fourier–Mukai action on them.
//!
//! A class `ch(E) = Σ a_ij d_ij` with `d_ij = e_i ⊗ f_j` is stored as the
//! 2×3 integer matrix `(a_ij)`: row `i ∈ {0, 1}` is the degree on the elliptic
//! curve, column `j ∈ {0, 1, 2}` the degree on the K3 surface. So
//! `ch_0 = a00`, `ch_1 = a10·H + a01·D`, `ch_2 = a11·d11 + a02·d02` and
//! `ch_3 = a12`, where `H = d10` and `D = d01`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{rational_from_i64, PosRational, Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("malformed Chern matrix {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("{name} must be a positive integer, got {value}")]
    NonPositiveInteger { name: &'static str, value: i64 },
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// `ch(E)` in the basis `d_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernMatrix {
    #[serde(rename = "m")]
    entries: [[i64; 3]; 2],
}

impl ChernMatrix {
    pub const ZERO: ChernMatrix = ChernMatrix { entries: [[0; 3]; 2] };

    pub const fn new(entries: [[i64; 3]; 2]) -> Self {
        Self { entries }
    }

    pub const fn from_rows(top: [i64; 3], bottom: [i64; 3]) -> Self {
        Self { entries: [top, bottom] }
    }

    /// `ch(O_X)`.
    pub const fn structure_sheaf() -> Self {
        Self::from_rows([1, 0, 0], [0, 0, 0])
    }

    /// `ch(O_x)` for a closed point `x`.
    pub const fn point() -> Self {
        Self::from_rows([0, 0, 0], [0, 0, 1])
    }

    pub const fn entries(&self) -> [[i64; 3]; 2] {
        self.entries
    }

    /// Row-major flattening `[a00, a01, a02, a10, a11, a12]`.
    pub fn flat(&self) -> [i64; 6] {
        let [[a, b, c], [d, e, f]] = self.entries;
        [a, b, c, d, e, f]
    }

    pub fn from_flat(v: [i64; 6]) -> Self {
        Self::from_rows([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    }

    /// Entry `a_ij`. Panics when `i > 1` or `j > 2`.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn a00(&self) -> i64 {
        self.entries[0][0]
    }
    pub fn a01(&self) -> i64 {
        self.entries[0][1]
    }
    pub fn a02(&self) -> i64 {
        self.entries[0][2]
    }
    pub fn a10(&self) -> i64 {
        self.entries[1][0]
    }
    pub fn a11(&self) -> i64 {
        self.entries[1][1]
    }
    pub fn a12(&self) -> i64 {
        self.entries[1][2]
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn scale(&self, k: i64) -> Self {
        self.map(|a| a * k)
    }

    fn map(&self, f: impl Fn(i64) -> i64) -> Self {
        let [[a, b, c], [d, e, g]] = self.entries;
        Self::from_rows([f(a), f(b), f(c)], [f(d), f(e), f(g)])
    }

    /// `ch(ΦE)`: the bottom row moves up, the old top row comes down negated.
    pub fn fm_transform(&self) -> Self {
        let [top, bottom] = self.entries;
        Self::from_rows(bottom, [-top[0], -top[1], -top[2]])
    }

    /// `ch(E[n]) = (-1)^n ch(E)`.
    pub fn shift(&self, n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            *self
        } else {
            -*self
        }
    }
}

impl Add for ChernMatrix {
    type Output = ChernMatrix;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (row, other) in out.entries.iter_mut().zip(rhs.entries) {
            for (a, b) in row.iter_mut().zip(other) {
                *a += b;
            }
        }
        out
    }
}

impl Sub for ChernMatrix {
    type Output = ChernMatrix;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ChernMatrix {
    type Output = ChernMatrix;

    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

/// Canonical text form `a00,a01,a02;a10,a11,a12`.
impl fmt::Display for ChernMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b, c], [d, e, g]] = self.entries;
        write!(f, "{a},{b},{c};{d},{e},{g}")
    }
}

impl FromStr for ChernMatrix {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| LatticeError::Parse { input: s.to_string(), reason: reason.to_string() };
        let rows: Vec<&str> = s.trim().split(';').collect();
        if rows.len() != 2 {
            return Err(fail("expected two rows separated by ';'"));
        }
        let mut entries = [[0i64; 3]; 2];
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 3 {
                return Err(fail("expected three comma-separated integers per row"));
            }
            for (j, cell) in cells.iter().enumerate() {
                entries[i][j] = cell.trim().parse().map_err(|_| fail(&format!("entry {cell:?} is not an integer")))?;
            }
        }
        Ok(Self { entries })
    }
}

/// Numerical data of the K3 base: `H_S² = 2h`, and `c` the least positive
/// fiber degree (1 on the product threefold).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeometryParams {
    h: i64,
    c: i64,
}

impl GeometryParams {
    pub fn new(h: i64, c: i64) -> Result<Self, LatticeError> {
        if h < 1 {
            return Err(LatticeError::NonPositiveInteger { name: "h", value: h });
        }
        if c < 1 {
            return Err(LatticeError::NonPositiveInteger { name: "c", value: c });
        }
        Ok(Self { h, c })
    }

    /// `c = 1`, the product-threefold value.
    pub fn with_h(h: i64) -> Result<Self, LatticeError> {
        Self::new(h, 1)
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn h_rational(&self) -> Rational {
        rational_from_i64(self.h)
    }
}

/// An ample class `ω = tH + sD` with `t, s > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polarization {
    t: PosRational,
    s: PosRational,
}

impl Polarization {
    pub fn new(t: Rational, s: Rational) -> Result<Self, LatticeError> {
        Ok(Self { t: PosRational::new("t", t)?, s: PosRational::new("s", s)? })
    }

    pub fn from_positive(t: PosRational, s: PosRational) -> Self {
        Self { t, s }
    }

    /// The point of the hyperbola `ts = α` with the given `s`.
    pub fn on_hyperbola(alpha: &PosRational, s: &PosRational) -> Self {
        let t = alpha.get() / s.get();
        Self { t: PosRational::new("t", t).expect("quotient of positives"), s: s.clone() }
    }

    /// The reference class `ω̄ = (λ/α)H + λD`.
    pub fn reference(alpha: &PosRational, lambda: &PosRational) -> Self {
        let t = lambda.get() / alpha.get();
        Self { t: PosRational::new("t", t).expect("quotient of positives"), s: lambda.clone() }
    }

    pub fn t(&self) -> &Rational {
        self.t.get()
    }

    pub fn s(&self) -> &Rational {
        self.s.get()
    }
}

/// Every pairing of `ch(E)` with powers of `ω` used by the slope functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionNumbers {
    pub omega3: Rational,
    pub omega2_ch1: Rational,
    pub omega_ch2: Rational,
    pub omega_ch1_sq: Rational,
    pub hd_ch01: Rational,
    pub d2_ch10: Rational,
    pub d_ch11: Rational,
    pub h_ch02: Rational,
    pub ch0: Rational,
    pub ch3: Rational,
}

pub fn intersection_numbers(m: &ChernMatrix, pol: &Polarization, geo: &GeometryParams) -> IntersectionNumbers {
    let h = geo.h_rational();
    let (t, s) = (pol.t(), pol.s());
    let a = |i, j| rational_from_i64(m.get(i, j));
    let two = rational_from_i64(2);
    let ts = t * s;
    let s2 = s * s;

    IntersectionNumbers {
        omega3: rational_from_i64(6) * &h * &ts * s,
        omega2_ch1: rational_from_i64(4) * &h * &ts * a(0, 1) + &two * &h * &s2 * a(1, 0),
        omega_ch2: t * a(0, 2) + &two * &h * s * a(1, 1),
        omega_ch1_sq: &two * &h * t * a(0, 1) * a(0, 1) + rational_from_i64(4) * &h * s * a(0, 1) * a(1, 0),
        hd_ch01: &two * &h * a(0, 1),
        d2_ch10: &two * &h * a(1, 0),
        d_ch11: &two * &h * a(1, 1),
        h_ch02: a(0, 2),
        ch0: a(0, 0),
        ch3: a(1, 2),
    }
}

impl IntersectionNumbers {
    /// `ωch₂ − (ω³/6)ch₀`, the numerator of the tilt slope.
    pub fn tilt_numerator(&self) -> Rational {
        &self.omega_ch2 - &self.omega3 * &self.ch0 / rational_from_i64(6)
    }
}
