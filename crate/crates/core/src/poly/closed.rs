//! Product-of-factors expressions: sums of terms `prod_j phi_j(x_j) * a` where each
//! factor `phi_j` is either an ordered power `x_j^e` or a zonal factor `Zt_k(x_j)`.
//!
//! This is the class closed under the operations needed for polynomial Almansi
//! components: it contains every right-coefficient polynomial and is stable under
//! spherical derivatives, since `(x^e)'_s = Zt_{e-1}` and zonal factors are circular.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::qpoly::QPolynomial;
use super::realmap::{RealPolyMap, MAX_DEGREE};
use super::zonal::zonal_table;
use crate::error::{Error, Result};
use crate::index::{check_set, IndexSet};
use crate::quat::Quaternion;
use crate::stem::{ComplexPoint, StemValue};

/// Coefficient magnitude above which expansion logs a conditioning warning.
const COEFF_WARN: f64 = 1e12;

/// One factor of a closed-form term, in a single variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    /// `x_j^e`.
    Power(u32),
    /// `Zt_k(x_j)` with `k >= 1`; `Zt_0 = 1` is stored as `Power(0)`.
    Zonal(u32),
}

impl Factor {
    fn zonal(k: i64) -> Option<Factor> {
        match k {
            k if k < 0 => None,
            0 => Some(Factor::Power(0)),
            k => Some(Factor::Zonal(k as u32)),
        }
    }

    fn degree(self) -> u32 {
        match self {
            Factor::Power(e) | Factor::Zonal(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedTerm {
    pub factors: Vec<Factor>,
    pub coeff: Quaternion,
}

/// Evaluable product form `sum prod_j phi_j(x_j) a`; zonal factors are real, powers
/// multiply in increasing variable order, and the coefficient sits on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    n: usize,
    terms: Vec<ClosedTerm>,
}

impl ClosedForm {
    fn from_terms(n: usize, terms: impl IntoIterator<Item = ClosedTerm>) -> Self {
        let mut merged: BTreeMap<Vec<Factor>, Quaternion> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.factors).or_default() += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != Quaternion::ZERO)
            .map(|(factors, coeff)| ClosedTerm { factors, coeff })
            .collect();
        Self { n, terms }
    }

    pub fn from_poly(p: &QPolynomial) -> Self {
        Self::from_terms(
            p.n(),
            p.terms().iter().map(|t| ClosedTerm {
                factors: t.alpha.iter().map(|&e| Factor::Power(e)).collect(),
                coeff: t.coeff,
            }),
        )
    }

    /// Closed form of the Almansi component `S^H_K(P)`:
    /// `sum_alpha prod_{j in H} Zt_{alpha_j - 1 + chi_K(j)}(x_j) prod_{i not in H} x_i^{alpha_i} a_alpha`.
    pub fn component(p: &QPolynomial, h: IndexSet, k: IndexSet) -> Result<Self> {
        check_set(h, p.n())?;
        if !k.is_subset(h) {
            return Err(Error::domain(format!("K = {k} is not a subset of H = {h}")));
        }
        let terms = p.terms().iter().filter_map(|t| {
            let factors = t
                .alpha
                .iter()
                .enumerate()
                .map(|(idx, &e)| {
                    let j = idx + 1;
                    if h.contains(j) {
                        Factor::zonal(e as i64 - 1 + k.contains(j) as i64)
                    } else {
                        Some(Factor::Power(e))
                    }
                })
                .collect::<Option<Vec<_>>>()?;
            Some(ClosedTerm {
                factors,
                coeff: t.coeff,
            })
        });
        Ok(Self::from_terms(p.n(), terms))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[ClosedTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.factors.iter().map(|f| f.degree()).sum())
            .max()
            .unwrap_or(0)
    }

    /// The polynomial this expression equals, if it has no zonal factor.
    pub fn as_polynomial(&self) -> Option<QPolynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let alpha = t
                    .factors
                    .iter()
                    .map(|f| match f {
                        Factor::Power(e) => Some(*e),
                        Factor::Zonal(_) => None,
                    })
                    .collect::<Option<Vec<_>>>()?;
                Some(super::qpoly::Term {
                    alpha,
                    coeff: t.coeff,
                })
            })
            .collect::<Option<Vec<_>>>()?;
        QPolynomial::new(self.n, terms).ok()
    }

    /// Spherical derivative in every variable of `h`; defined everywhere.
    pub fn spherical_derivative(&self, h: IndexSet) -> Self {
        let terms = self.terms.iter().filter_map(|t| {
            let mut factors = t.factors.clone();
            for j in h.iter() {
                factors[j - 1] = match factors[j - 1] {
                    Factor::Power(e) => Factor::zonal(e as i64 - 1)?,
                    Factor::Zonal(_) => return None,
                };
            }
            Some(ClosedTerm {
                factors,
                coeff: t.coeff,
            })
        });
        Self::from_terms(self.n, terms)
    }

    /// Per-variable largest power and zonal order.
    fn max_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let mut pw = vec![0; self.n];
        let mut zn = vec![0; self.n];
        for t in &self.terms {
            for (j, f) in t.factors.iter().enumerate() {
                match *f {
                    Factor::Power(e) => pw[j] = pw[j].max(e as usize),
                    Factor::Zonal(k) => zn[j] = zn[j].max(k as usize),
                }
            }
        }
        (pw, zn)
    }

    /// Direct pointwise evaluation.
    pub fn eval(&self, x: &[Quaternion]) -> Result<Quaternion> {
        if x.len() != self.n {
            return Err(Error::domain(format!(
                "point has {} coordinates, expression has {} variables",
                x.len(),
                self.n
            )));
        }
        let (pw, zn) = self.max_orders();
        let powers: Vec<Vec<Quaternion>> = x
            .iter()
            .zip(&pw)
            .map(|(&q, &d)| {
                let mut p = Vec::with_capacity(d + 1);
                p.push(Quaternion::ONE);
                for i in 0..d {
                    p.push(p[i] * q);
                }
                p
            })
            .collect();
        let zonals: Vec<Vec<f64>> = x
            .iter()
            .zip(&zn)
            .map(|(&q, &k)| zonal_table(k, q.w, q.im().norm_sqr()))
            .collect();
        let mut acc = Quaternion::ZERO;
        for t in &self.terms {
            let mut scalar = 1.0;
            let mut mono = Quaternion::ONE;
            for (j, f) in t.factors.iter().enumerate() {
                match *f {
                    Factor::Power(0) => {}
                    Factor::Power(e) => mono *= powers[j][e as usize],
                    Factor::Zonal(k) => scalar *= zonals[j][k as usize],
                }
            }
            acc += (mono * t.coeff).scale(scalar);
        }
        Ok(acc)
    }

    /// Value of the inducing stem function: `F_K = prod_{j in K} Im(phi_j) prod_{j not in K} Re(phi_j) a`
    /// with `phi_j = z_j^e` for powers and the real `Zt_k(alpha_j, beta_j)` for zonal factors.
    pub fn stem_value(&self, z: &ComplexPoint) -> StemValue {
        assert_eq!(z.n(), self.n, "point dimension mismatch");
        let n = self.n;
        let (pw, zn) = self.max_orders();
        let powers: Vec<Vec<Complex64>> = (1..=n)
            .map(|j| {
                let zj = z.z(j);
                let mut p = Vec::with_capacity(pw[j - 1] + 1);
                p.push(Complex64::new(1.0, 0.0));
                for i in 0..pw[j - 1] {
                    p.push(p[i] * zj);
                }
                p
            })
            .collect();
        let zonals: Vec<Vec<f64>> = (1..=n)
            .map(|j| zonal_table(zn[j - 1], z.alpha(j), z.beta(j) * z.beta(j)))
            .collect();
        let mut out = StemValue::zeros(n);
        let mut prods = vec![0.0; 1 << n];
        for t in &self.terms {
            prods.truncate(1);
            prods[0] = 1.0;
            for (j, f) in t.factors.iter().enumerate() {
                let (re, im) = match *f {
                    Factor::Power(e) => {
                        let c = powers[j][e as usize];
                        (c.re, c.im)
                    }
                    Factor::Zonal(k) => (zonals[j][k as usize], 0.0),
                };
                let len = prods.len();
                for i in 0..len {
                    let v = prods[i];
                    prods.push(v * im);
                    prods[i] = v * re;
                }
            }
            for (bits, &p) in prods.iter().enumerate() {
                if p != 0.0 {
                    out.comps_mut()[bits] += t.coeff.scale(p);
                }
            }
        }
        out
    }

    /// Bitmask over `K` (bit `K.bits()`) of the stem components that are not identically zero.
    pub fn support(&self) -> u64 {
        let mut sup = 0u64;
        for t in &self.terms {
            // allowed[K] iff every j in K has a power factor of positive degree
            let oddable = t
                .factors
                .iter()
                .enumerate()
                .filter(|(_, f)| matches!(f, Factor::Power(e) if *e > 0))
                .fold(0u32, |m, (j, _)| m | (1 << j));
            for k in IndexSet::from_bits(oddable).subsets() {
                sup |= 1u64 << k.bits();
            }
        }
        sup
    }

    /// Exact expansion into real coordinates.
    pub fn to_real_map(&self) -> Result<RealPolyMap> {
        let degree = self.degree();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                limit: MAX_DEGREE,
            });
        }
        let n = self.n;
        let mut cache: BTreeMap<(usize, Factor), RealPolyMap> = BTreeMap::new();
        let mut out = RealPolyMap::zero(n);
        for t in &self.terms {
            let mut m = RealPolyMap::constant(n, Quaternion::ONE);
            for (idx, &f) in t.factors.iter().enumerate() {
                if f == Factor::Power(0) {
                    continue;
                }
                let j = idx + 1;
                let fm = cache.entry((j, f)).or_insert_with(|| factor_map(n, j, f));
                m = m.mul(fm);
            }
            out = &out + &m.right_mul(t.coeff);
        }
        let big = out.max_abs_coeff();
        if big > COEFF_WARN {
            log::warn!("real expansion has coefficients up to {big:e}; expect loss of precision");
        }
        Ok(out)
    }
}

fn factor_map(n: usize, j: usize, f: Factor) -> RealPolyMap {
    match f {
        Factor::Power(e) => RealPolyMap::variable(n, j).pow(e),
        Factor::Zonal(k) => zonal_map(n, j, k),
    }
}

/// `Zt_k(x_j)` expanded through the recurrence with `beta^2 -> beta^2 + gamma^2 + delta^2`.
pub fn zonal_map(n: usize, j: usize, k: u32) -> RealPolyMap {
    let alpha = RealPolyMap::coordinate(n, j, 0);
    let two_alpha = alpha.scale(2.0);
    let norm_sq = &alpha.pow(2) + &RealPolyMap::im_norm_sqr(n, j);
    let mut prev = RealPolyMap::zero(n);
    let mut cur = RealPolyMap::constant(n, Quaternion::ONE);
    for _ in 0..k {
        let next = &two_alpha.mul(&cur) - &norm_sq.mul(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Formats a number, dropping the fractional part of integral values.
pub(crate) fn format_real(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub(crate) fn format_coeff(q: Quaternion) -> String {
    if q.im() == Quaternion::ZERO {
        return format_real(q.w);
    }
    let mut s = String::from("(");
    let mut first = true;
    for (v, unit) in [(q.w, ""), (q.x, "i"), (q.y, "j"), (q.z, "k")] {
        if v == 0.0 {
            continue;
        }
        let body = format!("{}{unit}", format_real(v.abs()));
        let body = if body == "1i" || body == "1j" || body == "1k" {
            unit.to_string()
        } else {
            body
        };
        match (first, v < 0.0) {
            (true, true) => s.push_str(&format!("-{body}")),
            (true, false) => s.push_str(&body),
            (false, true) => s.push_str(&format!("-{body}")),
            (false, false) => s.push_str(&format!("+{body}")),
        }
        first = false;
    }
    s.push(')');
    s
}

fn format_term(t: &ClosedTerm) -> String {
    let mut numeric = 1.0;
    let mut symbols = Vec::new();
    for (idx, f) in t.factors.iter().enumerate() {
        let j = idx + 1;
        match *f {
            Factor::Power(0) => {}
            Factor::Power(1) => symbols.push(format!("x{j}")),
            Factor::Power(e) => symbols.push(format!("x{j}^{e}")),
            Factor::Zonal(1) => {
                numeric *= 2.0;
                symbols.push(format!("a{j}"));
            }
            Factor::Zonal(k) => symbols.push(format!("Zt{k}(x{j})")),
        }
    }
    let real_coeff = t.coeff.im() == Quaternion::ZERO;
    if real_coeff {
        numeric *= t.coeff.w;
    }
    let mut parts = Vec::new();
    let mut prefix = "";
    if numeric == -1.0 && !symbols.is_empty() {
        prefix = "-";
    } else if numeric != 1.0 || (symbols.is_empty() && real_coeff) {
        parts.push(format_real(numeric));
    }
    parts.extend(symbols);
    if !real_coeff {
        parts.push(format_coeff(t.coeff));
    }
    format!("{prefix}{}", parts.join("*"))
}

/// Renders terms like `2*a1*x2` and `Zt2(x3)*x1`, with `a{j} = Re x_j`.
impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let s = format_term(t);
            match (i, s.strip_prefix('-')) {
                (0, _) => write!(f, "{s}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {s}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::zonal::zonal_tilde;

    fn x1x2() -> QPolynomial {
        QPolynomial::monomial(vec![1, 1], Quaternion::ONE).unwrap()
    }

    #[test]
    fn components_of_x1x2() {
        let p = x1x2();
        let h1 = IndexSet::singleton(1);
        let c = |h, k| ClosedForm::component(&p, h, k).unwrap().to_string();
        assert_eq!(c(h1, h1), "2*a1*x2");
        assert_eq!(c(h1, IndexSet::EMPTY), "x2");
        let h12 = IndexSet::interval(2);
        assert_eq!(c(h12, h12), "4*a1*a2");
        assert_eq!(c(h12, IndexSet::singleton(2)), "2*a2");
        assert_eq!(c(h12, IndexSet::singleton(1)), "2*a1");
        assert_eq!(c(h12, IndexSet::EMPTY), "1");
    }

    #[test]
    fn cubic_factor_under_h() {
        // x3^3 with H containing 3 and K not: Zt2(x3) = 3 a^2 - b^2
        let p = QPolynomial::monomial(vec![0, 0, 3], Quaternion::ONE).unwrap();
        let c = ClosedForm::component(&p, IndexSet::singleton(3), IndexSet::EMPTY).unwrap();
        assert_eq!(c.to_string(), "Zt2(x3)");
        let x = [
            Quaternion::ONE,
            Quaternion::ONE,
            Quaternion::new(0.4, 0.1, -0.5, 0.2),
        ];
        let (a, b2) = (0.4, 0.01 + 0.25 + 0.04);
        assert!((c.eval(&x).unwrap().w - (3.0 * a * a - b2)).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_power_is_zonal() {
        for e in 1..=9u32 {
            let p = QPolynomial::monomial(vec![e], Quaternion::ONE).unwrap();
            let d = ClosedForm::from_poly(&p).spherical_derivative(IndexSet::singleton(1));
            let q = Quaternion::new(0.2, 0.5, -0.3, 0.7);
            let v = d.eval(&[q]).unwrap();
            assert!((v - Quaternion::real(zonal_tilde(e as i32 - 1, q))).norm() < 1e-13);
        }
    }

    #[test]
    fn real_map_of_zonal_two() {
        let m = zonal_map(1, 1, 2);
        let e = |a: u8, b: u8, g: u8, d: u8| vec![a, b, g, d];
        assert_eq!(m.coeff(&e(2, 0, 0, 0)), Quaternion::real(3.0));
        assert_eq!(m.coeff(&e(0, 2, 0, 0)), Quaternion::real(-1.0));
        assert_eq!(m.coeff(&e(0, 0, 2, 0)), Quaternion::real(-1.0));
        assert_eq!(m.coeff(&e(0, 0, 0, 2)), Quaternion::real(-1.0));
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn support_of_products() {
        let f = ClosedForm::from_poly(&x1x2());
        assert_eq!(f.support(), 0b1111);
        let c =
            ClosedForm::component(&x1x2(), IndexSet::singleton(1), IndexSet::singleton(1)).unwrap();
        // 2 a1 x2: components {} and {2}
        assert_eq!(c.support(), (1 << 0) | (1 << 2));
    }

    #[test]
    fn degree_guard() {
        let p = QPolynomial::monomial(vec![20, 13], Quaternion::ONE).unwrap();
        assert!(matches!(
            ClosedForm::from_poly(&p).to_real_map(),
            Err(Error::DegreeOverflow { degree: 33, .. })
        ));
    }

    #[test]
    fn display_of_quaternion_coefficients() {
        let p = QPolynomial::monomial(vec![1, 0], Quaternion::new(1.0, 0.0, -2.0, 0.0)).unwrap();
        assert_eq!(ClosedForm::from_poly(&p).to_string(), "x1*(1-2j)");
        let q = QPolynomial::monomial(vec![0, 1], Quaternion::real(-1.0)).unwrap();
        let s = ClosedForm::from_poly(&p.add(&q).unwrap()).to_string();
        assert_eq!(s, "-x2 + x1*(1-2j)");
    }
}
