use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{check_n, check_var};
use crate::quat::Quaternion;

/// One term `x_1^{alpha_1} ... x_n^{alpha_n} a` of a right-coefficient polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub coeff: Quaternion,
}

/// Quaternionic polynomial with right coefficients, `sum_alpha x^alpha a_alpha`.
///
/// Exponent vectors are distinct and sorted; zero coefficients are dropped.
/// Evaluation uses the ordered product `x_1^{alpha_1} ... x_n^{alpha_n} a_alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QPolynomial {
    n: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolynomial {
    n: usize,
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for QPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolynomial::deserialize(d)?;
        QPolynomial::new(raw.n, raw.terms).map_err(serde::de::Error::custom)
    }
}

impl QPolynomial {
    /// Builds a polynomial, merging repeated exponent vectors.
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        check_n(n)?;
        let mut merged: BTreeMap<Vec<u32>, Quaternion> = BTreeMap::new();
        for t in terms {
            if t.alpha.len() != n {
                return Err(Error::domain(format!(
                    "exponent vector {:?} has length {}, expected {n}",
                    t.alpha,
                    t.alpha.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::domain("polynomial coefficients must be finite"));
            }
            *merged.entry(t.alpha).or_default() += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != Quaternion::ZERO)
            .map(|(alpha, coeff)| Term { alpha, coeff })
            .collect();
        Ok(Self { n, terms })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn constant(n: usize, c: Quaternion) -> Result<Self> {
        Self::new(
            n,
            vec![Term {
                alpha: vec![0; n],
                coeff: c,
            }],
        )
    }

    pub fn monomial(alpha: Vec<u32>, coeff: Quaternion) -> Result<Self> {
        let n = alpha.len();
        Self::new(n, vec![Term { alpha, coeff }])
    }

    /// The coordinate function `x_h`.
    pub fn var(n: usize, h: usize) -> Result<Self> {
        check_var(h, n)?;
        let mut alpha = vec![0; n];
        alpha[h - 1] = 1;
        Self::monomial(alpha, Quaternion::ONE)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.alpha.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Whether every coefficient is real (the polynomial is slice preserving).
    pub fn has_real_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im() == Quaternion::ZERO)
    }

    /// Whether no term involves a variable with index below `m`.
    pub fn uses_only_vars_from(&self, m: usize) -> bool {
        self.terms
            .iter()
            .all(|t| t.alpha.iter().take(m.saturating_sub(1)).all(|&e| e == 0))
    }

    /// Pointwise evaluation with the ordered product and the coefficient on the right.
    pub fn eval(&self, x: &[Quaternion]) -> Result<Quaternion> {
        if x.len() != self.n {
            return Err(Error::domain(format!(
                "point has {} coordinates, polynomial has {} variables",
                x.len(),
                self.n
            )));
        }
        let maxdeg: Vec<u32> = (0..self.n)
            .map(|j| self.terms.iter().map(|t| t.alpha[j]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Quaternion>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(&q, &d)| {
                let mut p = vec![Quaternion::ONE];
                for _ in 0..d {
                    let last = *p.last().unwrap();
                    p.push(last * q);
                }
                p
            })
            .collect();
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let mono: Quaternion = t
                    .alpha
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| powers[j][e as usize])
                    .product();
                mono * t.coeff
            })
            .sum())
    }

    pub fn add(&self, other: &QPolynomial) -> Result<QPolynomial> {
        self.check_same_n(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.n, terms)
    }

    pub fn scale_right(&self, q: Quaternion) -> QPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                alpha: t.alpha.clone(),
                coeff: t.coeff * q,
            })
            .collect();
        Self::new(self.n, terms).expect("n already validated")
    }

    /// Slice product: `(x^a p) * (x^b q) = x^{a+b} (p q)`, extended bilinearly.
    pub fn slice_product(&self, other: &QPolynomial) -> Result<QPolynomial> {
        self.check_same_n(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let alpha = a.alpha.iter().zip(&b.alpha).map(|(x, y)| x + y).collect();
                terms.push(Term {
                    alpha,
                    coeff: a.coeff * b.coeff,
                });
            }
        }
        Self::new(self.n, terms)
    }

    fn check_same_n(&self, other: &QPolynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "variable counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Free-function form of [`QPolynomial::slice_product`].
pub fn poly_slice_product(p: &QPolynomial, q: &QPolynomial) -> Result<QPolynomial> {
    p.slice_product(q)
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = t
                .alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    if e == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, e)
                    }
                })
                .collect();
            let c = super::closed::format_coeff(t.coeff);
            match (mono.is_empty(), c.as_str()) {
                (true, _) => write!(f, "{c}")?,
                (false, "1") => write!(f, "{}", mono.join("*"))?,
                (false, _) => write!(f, "{}*{c}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}
