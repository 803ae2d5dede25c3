//! Sign-pattern cells of Chern matrices, their pairing under the transform,
//! the nested ladder of torsion classes they generate, and the entry bounds
//! into the limit heart.
//!
//! Everything here is a Chern-level necessary condition: a matrix matching a
//! cell is consistent with the category, it does not certify membership.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::ChernMatrix;
use crate::rational::{self, rational_from_i64, PosRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("ladder level must be between 1 and {max}, got {level}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("{name} must be a positive integer, got {value}")]
    NonPositive { name: &'static str, value: i64 },
    #[error("unknown cell name {0:?}")]
    UnknownCell(String),
}

/// Constraint on one matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Zero,
    Positive,
    Negative,
    Free,
}

impl Sign {
    pub fn admits(self, v: i64) -> bool {
        match self {
            Sign::Zero => v == 0,
            Sign::Positive => v > 0,
            Sign::Negative => v < 0,
            Sign::Free => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternCell {
    C0,
    C1_0Plus,
    C1_0Zero,
    C1_0Minus,
    C1_1,
    C2_1Plus,
    C2_1Zero,
    C2_1Minus,
    C2_2Plus,
    C3_2Plus,
    C3_2Zero,
    C3_2Minus,
}

use PatternCell::*;
use Sign::{Free as F, Negative as N, Positive as P, Zero as Z};

impl PatternCell {
    /// In ladder order: the `k`-th nested torsion class is generated by the
    /// first `k` cells.
    pub const ALL: [PatternCell; 12] =
        [C0, C1_0Plus, C1_0Zero, C1_0Minus, C1_1, C2_1Plus, C2_1Zero, C2_1Minus, C2_2Plus, C3_2Plus, C3_2Zero, C3_2Minus];

    pub fn name(self) -> &'static str {
        match self {
            C0 => "C0",
            C1_0Plus => "C1_{0,+}",
            C1_0Zero => "C1_{0,0}",
            C1_0Minus => "C1_{0,-}",
            C1_1 => "C1_1",
            C2_1Plus => "C2_{1,+}",
            C2_1Zero => "C2_{1,0}",
            C2_1Minus => "C2_{1,-}",
            C2_2Plus => "C2_{2,+}",
            C3_2Plus => "C3_{2,+}",
            C3_2Zero => "C3_{2,0}",
            C3_2Minus => "C3_{2,-}",
        }
    }

    /// Entry constraints, laid out like the matrix.
    pub fn constraints(self) -> [[Sign; 3]; 2] {
        match self {
            C0 => [[Z, Z, Z], [Z, Z, P]],
            C1_0Plus => [[Z, Z, P], [Z, Z, P]],
            C1_0Zero => [[Z, Z, P], [Z, Z, Z]],
            C1_0Minus => [[Z, Z, P], [Z, Z, N]],
            C1_1 => [[Z, Z, F], [Z, P, F]],
            C2_1Plus => [[Z, P, F], [Z, P, F]],
            C2_1Zero => [[Z, P, F], [Z, Z, F]],
            C2_1Minus => [[Z, P, F], [Z, N, F]],
            C2_2Plus => [[Z, F, F], [P, F, F]],
            C3_2Plus => [[P, F, F], [P, F, F]],
            C3_2Zero => [[P, F, F], [Z, F, F]],
            C3_2Minus => [[P, F, F], [N, F, F]],
        }
    }

    pub fn matches(self, m: &ChernMatrix) -> bool {
        let c = self.constraints();
        (0..2).all(|i| (0..3).all(|j| c[i][j].admits(m.get(i, j))))
    }

    /// 0 for the cells whose objects transform in degree 0, 1 otherwise.
    pub fn wit_index(self) -> u8 {
        match self {
            C0 | C1_0Plus | C1_1 | C2_1Plus | C2_2Plus | C3_2Plus => 0,
            _ => 1,
        }
    }

    /// The cell the transform carries this one onto.
    pub fn fm_partner(self) -> PatternCell {
        match self {
            C0 => C1_0Zero,
            C1_0Zero => C0,
            C1_0Plus => C1_0Minus,
            C1_0Minus => C1_0Plus,
            C1_1 => C2_1Zero,
            C2_1Zero => C1_1,
            C2_1Plus => C2_1Minus,
            C2_1Minus => C2_1Plus,
            C2_2Plus => C3_2Zero,
            C3_2Zero => C2_2Plus,
            C3_2Plus => C3_2Minus,
            C3_2Minus => C3_2Plus,
        }
    }

    /// Chern matrix of the transform of an object in this cell, placed in
    /// degree 0: `Φ(M)` for WIT₀ cells, `Φ(M)[1]` for WIT₁ cells.
    pub fn transform(self, m: &ChernMatrix) -> ChernMatrix {
        m.fm_transform().shift(i64::from(self.wit_index()))
    }
}

impl fmt::Display for PatternCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternCell {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternCell::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| PatternError::UnknownCell(s.to_string()))
    }
}

impl Serialize for PatternCell {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PatternCell {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Image of a cell under the transform together with the degree it lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CellImage {
    pub cell: PatternCell,
    pub wit: u8,
}

pub fn fm_cell_image(cell: PatternCell) -> CellImage {
    CellImage { cell: cell.fm_partner(), wit: cell.wit_index() }
}

/// Every cell whose sign table `m` satisfies.
pub fn classify(m: &ChernMatrix) -> Vec<PatternCell> {
    PatternCell::ALL.into_iter().filter(|c| c.matches(m)).collect()
}

pub const LADDER_LEVELS: usize = PatternCell::ALL.len();

pub fn ladder_cells(level: usize) -> Result<&'static [PatternCell], PatternError> {
    if (1..=LADDER_LEVELS).contains(&level) {
        Ok(&PatternCell::ALL[..level])
    } else {
        Err(PatternError::LevelOutOfRange { level, max: LADDER_LEVELS })
    }
}

/// Writes `m` as a sum of matrices each matching a cell of the given ladder
/// level, using as few summands as possible; `None` if impossible.
///
/// Every cell is a product of per-entry sign sets closed under addition, so a
/// decomposition exists iff for some nonempty set of cells each entry of `m`
/// lies in the sum of that entry's sign sets. That makes the search finite and
/// exact: no bound on cancellation is needed. The zero matrix is the empty sum.
pub fn ladder_decomposition(
    m: &ChernMatrix,
    level: usize,
) -> Result<Option<Vec<(PatternCell, ChernMatrix)>>, PatternError> {
    let cells = ladder_cells(level)?;
    if m.is_zero() {
        return Ok(Some(Vec::new()));
    }
    let mut subsets: Vec<u32> = (1..1u32 << cells.len()).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for mask in subsets {
        let chosen: Vec<PatternCell> =
            cells.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, c)| *c).collect();
        if let Some(parts) = split_entries(m, &chosen) {
            return Ok(Some(chosen.into_iter().zip(parts).collect()));
        }
    }
    Ok(None)
}

pub fn ladder_membership(m: &ChernMatrix, level: usize) -> Result<bool, PatternError> {
    Ok(ladder_decomposition(m, level)?.is_some())
}

/// Smallest ladder level containing `m`, if any.
pub fn minimal_ladder_level(m: &ChernMatrix) -> Option<usize> {
    (1..=LADDER_LEVELS).find(|&k| ladder_membership(m, k).expect("level in range"))
}

/// One summand per chosen cell adding up to `m`, entry by entry.
fn split_entries(m: &ChernMatrix, chosen: &[PatternCell]) -> Option<Vec<ChernMatrix>> {
    let mut parts = vec![[0i64; 6]; chosen.len()];
    for (pos, target) in m.flat().into_iter().enumerate() {
        let signs: Vec<Sign> = chosen.iter().map(|c| c.constraints()[pos / 3][pos % 3]).collect();
        let values = split_value(target, &signs)?;
        for (part, v) in parts.iter_mut().zip(values) {
            part[pos] = v;
        }
    }
    Some(parts.into_iter().map(ChernMatrix::from_flat).collect())
}

/// Values `v_k` admitted by `signs[k]` with `Σ v_k = target`.
fn split_value(target: i64, signs: &[Sign]) -> Option<Vec<i64>> {
    let mut values: Vec<i64> = signs
        .iter()
        .map(|s| match s {
            Sign::Positive => 1,
            Sign::Negative => -1,
            Sign::Zero | Sign::Free => 0,
        })
        .collect();
    let slack = target - values.iter().sum::<i64>();
    if slack == 0 {
        return Some(values);
    }
    let absorber = signs.iter().position(|s| *s == Sign::Free).or_else(|| {
        let wanted = if slack > 0 { Sign::Positive } else { Sign::Negative };
        signs.iter().position(|s| *s == wanted)
    })?;
    values[absorber] += slack;
    Some(values)
}

fn positive_integer(name: &'static str, value: i64) -> Result<Rational, PatternError> {
    if value < 1 {
        Err(PatternError::NonPositive { name, value })
    } else {
        Ok(rational_from_i64(value))
    }
}

/// `s₀ = 2·t₀·rank·μ*max / c`.
pub fn entry_bound_s0(rank: i64, mu_star_max: &Rational, t0: &PosRational, c: i64) -> Result<Rational, PatternError> {
    let rank = positive_integer("rank", rank)?;
    let c = positive_integer("c", c)?;
    Ok(rational_from_i64(2) * t0.get() * rank * mu_star_max / c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    TorsionFreeClass,
    TorsionClass,
}

impl FromStr for BoundVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "torsion_free_class" | "torsion-free-class" | "free" => Ok(Self::TorsionFreeClass),
            "torsion_class" | "torsion-class" | "torsion" => Ok(Self::TorsionClass),
            other => Err(format!("unknown bound variant {other:?} (expected torsion_free_class or torsion_class)")),
        }
    }
}

/// A threshold on `s²`: the inclusion holds for `s² ≥ bound` (inclusive) or
/// `s² > bound` (strict).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HeartBound {
    #[serde(with = "rational::as_fraction")]
    pub s_squared: Rational,
    pub strict: bool,
}

impl HeartBound {
    pub fn admits(&self, s: &Rational) -> bool {
        let sq = s * s;
        if self.strict {
            sq > self.s_squared
        } else {
            sq >= self.s_squared
        }
    }
}

/// `S² = 2α·|μ*extreme|·rank / c`.
pub fn limit_heart_bound(
    rank: i64,
    mu_star_extreme: &Rational,
    alpha: &PosRational,
    c: i64,
    variant: BoundVariant,
) -> Result<HeartBound, PatternError> {
    let rank = positive_integer("rank", rank)?;
    let c = positive_integer("c", c)?;
    let s_squared = rational_from_i64(2) * alpha.get() * mu_star_extreme.abs() * rank / c;
    debug_assert!(!s_squared.is_negative());
    Ok(HeartBound { s_squared, strict: variant == BoundVariant::TorsionClass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn m(top: [i64; 3], bottom: [i64; 3]) -> ChernMatrix {
        ChernMatrix::from_rows(top, bottom)
    }

    fn qq(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pos(n: i64, d: i64) -> PosRational {
        PosRational::new("x", qq(n, d)).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&m([0, 0, 0], [0, 0, 1])), vec![C0]);
        assert_eq!(classify(&m([0, 0, 1], [0, 0, -1])), vec![C1_0Minus]);
        assert_eq!(classify(&ChernMatrix::structure_sheaf()), vec![C3_2Zero]);
        assert!(classify(&m([-1, 0, 0], [0, 0, 0])).is_empty());
        assert_eq!(classify(&m([0, 1, 0], [1, 0, 0])), vec![C2_2Plus]);
    }

    #[test]
    fn cell_table_spot_checks() {
        assert_eq!(C1_0Plus.constraints(), [[Z, Z, P], [Z, Z, P]]);
        assert_eq!(C2_1Minus.constraints()[0][..2], [Z, P]);
        assert_eq!(C2_1Minus.constraints()[1][..2], [Z, N]);
        assert_eq!(C3_2Plus.constraints()[0][0], P);
        assert_eq!(C3_2Plus.constraints()[1][0], P);
        assert_eq!(C2_1Plus.constraints()[1][1], P);
    }

    #[test]
    fn image_examples() {
        assert_eq!(fm_cell_image(C0), CellImage { cell: C1_0Zero, wit: 0 });
        assert_eq!(fm_cell_image(C2_1Plus), CellImage { cell: C2_1Minus, wit: 0 });
        assert_eq!(fm_cell_image(C3_2Minus), CellImage { cell: C3_2Plus, wit: 1 });
        for c in PatternCell::ALL {
            assert_eq!(fm_cell_image(fm_cell_image(c).cell).cell, c);
        }
    }

    #[test]
    fn names_round_trip() {
        for c in PatternCell::ALL {
            assert_eq!(c.name().parse::<PatternCell>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(serde_json::from_str::<PatternCell>(&json).unwrap(), c);
        }
        assert_eq!(serde_json::to_string(&C3_2Minus).unwrap(), r#""C3_{2,-}""#);
        assert!("C4".parse::<PatternCell>().is_err());
    }

    #[test]
    fn ladder_examples() {
        let point = m([0, 0, 0], [0, 0, 1]);
        assert!(ladder_membership(&point, 1).unwrap());
        let fiber = m([0, 0, 1], [0, 0, -1]);
        assert!(!ladder_membership(&fiber, 1).unwrap());
        assert!(!ladder_membership(&fiber, 3).unwrap());
        assert!(ladder_membership(&fiber, 4).unwrap());
        let ox = ChernMatrix::structure_sheaf();
        assert!(!ladder_membership(&ox, 10).unwrap());
        assert!(ladder_membership(&ox, 11).unwrap());
        assert_eq!(minimal_ladder_level(&ox), Some(11));
        assert_eq!(minimal_ladder_level(&m([-1, 0, 0], [0, 0, 0])), None);
        assert_eq!(minimal_ladder_level(&ChernMatrix::ZERO), Some(1));
        assert!(ladder_membership(&ox, 0).is_err());
        assert!(ladder_membership(&ox, 13).is_err());
    }

    #[test]
    fn decomposition_is_a_valid_witness() {
        let target = m([0, 0, -2], [0, 1, 1]);
        assert!(ladder_decomposition(&target, 4).unwrap().is_none());
        let parts = ladder_decomposition(&target, 5).unwrap().unwrap();
        assert_eq!(parts, vec![(C1_1, target)]);
        assert_eq!(ladder_decomposition(&ChernMatrix::ZERO, 1).unwrap(), Some(Vec::new()));
    }

    #[test]
    fn bound_examples() {
        let zero = Rational::zero();
        assert_eq!(entry_bound_s0(1, &zero, &pos(1, 1), 1).unwrap(), zero);
        assert_eq!(entry_bound_s0(2, &qq(3, 1), &pos(1, 1), 1).unwrap(), qq(12, 1));
        assert_eq!(entry_bound_s0(3, &qq(1, 2), &pos(2, 1), 1).unwrap(), qq(6, 1));
        assert!(entry_bound_s0(0, &zero, &pos(1, 1), 1).is_err());

        let b = limit_heart_bound(1, &zero, &pos(1, 1), 1, BoundVariant::TorsionFreeClass).unwrap();
        assert_eq!(b, HeartBound { s_squared: zero.clone(), strict: false });
        let b = limit_heart_bound(2, &qq(-3, 1), &pos(1, 1), 1, BoundVariant::TorsionClass).unwrap();
        assert_eq!(b, HeartBound { s_squared: qq(12, 1), strict: true });
        assert!(!b.admits(&qq(3464, 1000)) && b.admits(&qq(3465, 1000)));
        let b = limit_heart_bound(1, &qq(1, 1), &pos(4, 1), 1, BoundVariant::TorsionFreeClass).unwrap();
        assert_eq!(b.s_squared, qq(8, 1));
        assert!(!b.strict);
    }

    /// Sums reachable from the level's cells using generators with entries in
    /// `{-1, 0, 1}` while staying inside `[-r, r]⁶`.
    fn reachable(level: usize, r: i64) -> HashSet<[i64; 6]> {
        let cells = &PatternCell::ALL[..level];
        let mut generators = Vec::new();
        for code in 0..729 {
            let mut flat = [0i64; 6];
            let mut c = code;
            for v in flat.iter_mut() {
                *v = c % 3 - 1;
                c /= 3;
            }
            let g = ChernMatrix::from_flat(flat);
            if cells.iter().any(|cell| cell.matches(&g)) {
                generators.push(flat);
            }
        }
        let mut seen: HashSet<[i64; 6]> = HashSet::new();
        seen.insert([0; 6]);
        let mut frontier = vec![[0i64; 6]];
        while let Some(x) = frontier.pop() {
            for g in &generators {
                let mut y = x;
                for k in 0..6 {
                    y[k] += g[k];
                }
                if y.iter().all(|v| v.abs() <= r) && seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn exact_decision_matches_bounded_reachability() {
        for level in [1, 3, 4, 5, 7, 9, 11, 12] {
            let reach = reachable(level, 2);
            for code in 0..729 {
                let mut flat = [0i64; 6];
                let mut c = code;
                for v in flat.iter_mut() {
                    *v = c % 3 - 1;
                    c /= 3;
                }
                let target = ChernMatrix::from_flat(flat);
                let exact = ladder_membership(&target, level).unwrap();
                assert_eq!(exact, reach.contains(&flat), "level {level}, {target}");
            }
        }
    }

    fn cell_conforming() -> impl Strategy<Value = (PatternCell, ChernMatrix)> {
        (0usize..12, proptest::array::uniform6(1i64..=50), proptest::array::uniform6(-50i64..=50)).prop_map(
            |(k, mags, frees)| {
                let cell = PatternCell::ALL[k];
                let c = cell.constraints();
                let mut flat = [0i64; 6];
                for pos in 0..6 {
                    flat[pos] = match c[pos / 3][pos % 3] {
                        Z => 0,
                        P => mags[pos],
                        N => -mags[pos],
                        F => frees[pos],
                    };
                }
                (cell, ChernMatrix::from_flat(flat))
            },
        )
    }

    proptest! {
        #[test]
        fn transform_lands_in_partner_cell((cell, mm) in cell_conforming()) {
            prop_assert!(cell.matches(&mm));
            let image = fm_cell_image(cell);
            prop_assert!(classify(&cell.transform(&mm)).contains(&image.cell));
        }

        #[test]
        fn ladder_is_monotone(flat in proptest::array::uniform6(-4i64..=4)) {
            let mm = ChernMatrix::from_flat(flat);
            let verdicts: Vec<bool> = (1..=LADDER_LEVELS).map(|k| ladder_membership(&mm, k).unwrap()).collect();
            prop_assert!(verdicts.windows(2).all(|w| !w[0] || w[1]));
            if let Some(parts) = ladder_decomposition(&mm, LADDER_LEVELS).unwrap() {
                let total = parts.iter().fold(ChernMatrix::ZERO, |acc, (_, p)| acc + *p);
                prop_assert_eq!(total, mm);
                prop_assert!(parts.iter().all(|(c, p)| c.matches(p)));
            }
        }

        #[test]
        fn bounds_are_homogeneous(rank in 1i64..=20, n in -40i64..=40, d in 1i64..=9, t in 1i64..=9) {
            let mu = qq(n, d);
            let half = &mu / rational_from_i64(2);
            let t0 = pos(t, 1);
            prop_assert_eq!(entry_bound_s0(rank, &mu, &t0, 1).unwrap(), entry_bound_s0(2 * rank, &half, &t0, 1).unwrap());
            for v in [BoundVariant::TorsionClass, BoundVariant::TorsionFreeClass] {
                prop_assert_eq!(
                    limit_heart_bound(rank, &mu, &t0, 3, v).unwrap(),
                    limit_heart_bound(2 * rank, &half, &t0, 3, v).unwrap()
                );
            }
        }
    }
}
