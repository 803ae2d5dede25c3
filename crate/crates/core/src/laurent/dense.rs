//! Dense univariate polynomials over `Q`, just enough for square-free
//! decomposition and Sturm sequences.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Coefficients in ascending degree; no trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DensePoly {
    coeffs: Vec<Rational>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![Rational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer(k.into())).collect();
        Self::new(coeffs)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lead) => Self { coeffs: self.coeffs.iter().map(|c| c / lead).collect() },
        }
    }

    /// Divides by the absolute value of the leading coefficient, which keeps
    /// every sign intact.
    pub fn sign_normalized(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lead) => {
                let scale = lead.abs();
                Self { coeffs: self.coeffs.iter().map(|c| c / &scale).collect() }
            }
        }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero))
            .collect();
        Self::new(coeffs)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dlead = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let factor = &rem[k + dd] / dlead;
            if !factor.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &factor * dc;
                }
            }
            quot[k] = factor;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's square-free decomposition: pairs `(f_i, i)` with each `f_i`
    /// monic, square-free, pairwise coprime, and `self = lead · Π f_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(DensePoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0);
        let c = df.exact_div(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let next_b = b.exact_div(&a);
            let c = d.exact_div(&a);
            d = c.sub(&next_b.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            b = next_b;
            i += 1;
        }
        out
    }

    /// Sturm chain `p, p', -rem(p, p'), ...` with each member sign-normalized.
    pub fn sturm_chain(&self) -> Vec<DensePoly> {
        let mut chain = vec![self.sign_normalized()];
        let mut next = self.derivative().sign_normalized();
        while !next.is_zero() {
            let prev = chain.last().expect("chain is nonempty");
            let rem = prev.div_rem(&next).1.neg().sign_normalized();
            chain.push(next);
            next = rem;
        }
        chain
    }
}

/// Sign variations of a Sturm chain at `x`, skipping zeros.
pub(crate) fn sign_variations(chain: &[DensePoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}
