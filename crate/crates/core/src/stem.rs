//! Stem functions `F = sum_K e_K F_K : D ⊂ C^n -> H ⊗ R^{2^n}`.
//!
//! A stem value is stored densely: component `F_K` lives at index `K.bits()`.
//! Stem functions are immutable expression trees over a few leaf kinds
//! (closed-form polynomial expressions and builtins), combined by the signed
//! tensor product, spherical values, spherical derivatives and real linear
//! combinations. Evaluation is pure and safe to run from several threads.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{check_n, check_set, check_var, IndexSet};
use crate::numdiff;
use crate::poly::{ClosedForm, QPolynomial};
use crate::quat::Quaternion;

/// A point `z = (alpha_1 + i beta_1, ..., alpha_n + i beta_n)` of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint {
    coords: Vec<Complex64>,
}

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        check_n(coords.len())?;
        Ok(Self { coords })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn z(&self, h: usize) -> Complex64 {
        self.coords[h - 1]
    }

    pub fn alpha(&self, h: usize) -> f64 {
        self.coords[h - 1].re
    }

    pub fn beta(&self, h: usize) -> f64 {
        self.coords[h - 1].im
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// `z̄^h`: conjugates coordinate `h` only.
    pub fn conj_at(&self, h: usize) -> Self {
        let mut c = self.clone();
        c.coords[h - 1] = c.coords[h - 1].conj();
        c
    }

    pub fn with_alpha(&self, h: usize, alpha: f64) -> Self {
        let mut c = self.clone();
        c.coords[h - 1].re = alpha;
        c
    }

    pub fn with_beta(&self, h: usize, beta: f64) -> Self {
        let mut c = self.clone();
        c.coords[h - 1].im = beta;
        c
    }
}

/// `sum_K e_K F_K` at one point, `2^n` quaternions.
#[derive(Debug, Clone, PartialEq)]
pub struct StemValue {
    n: usize,
    comps: Vec<Quaternion>,
}

impl StemValue {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            comps: vec![Quaternion::ZERO; 1 << n],
        }
    }

    pub fn from_comps(n: usize, comps: Vec<Quaternion>) -> Result<Self> {
        if comps.len() != 1 << n {
            return Err(Error::domain(format!(
                "stem value for n = {n} needs {} components, got {}",
                1 << n,
                comps.len()
            )));
        }
        Ok(Self { n, comps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: IndexSet) -> Quaternion {
        self.comps[k.bits() as usize]
    }

    pub fn set(&mut self, k: IndexSet, q: Quaternion) {
        self.comps[k.bits() as usize] = q;
    }

    pub fn comps(&self) -> &[Quaternion] {
        &self.comps
    }

    pub(crate) fn comps_mut(&mut self) -> &mut [Quaternion] {
        &mut self.comps
    }

    /// Signed tensor product: `(F ⊗ G)_M = sum_{K Δ H = M} (-1)^{|K ∩ H|} F_K G_H`.
    pub fn tensor(&self, other: &StemValue) -> StemValue {
        assert_eq!(self.n, other.n, "variable counts differ");
        let mut out = StemValue::zeros(self.n);
        for (k, &fk) in self.comps.iter().enumerate() {
            if fk == Quaternion::ZERO {
                continue;
            }
            for (h, &gh) in other.comps.iter().enumerate() {
                if gh == Quaternion::ZERO {
                    continue;
                }
                let p = fk * gh;
                let m = k ^ h;
                if (k & h).count_ones() % 2 == 0 {
                    out.comps[m] += p;
                } else {
                    out.comps[m] -= p;
                }
            }
        }
        out
    }

    /// Keeps the components `F_K` with `K ⊂ H^c`.
    pub fn spherical_value(&self, h: IndexSet) -> StemValue {
        let mut out = self.clone();
        for (k, c) in out.comps.iter_mut().enumerate() {
            if k as u32 & h.bits() != 0 {
                *c = Quaternion::ZERO;
            }
        }
        out
    }

    /// `beta_H^{-1} sum_{K ⊂ H^c} e_K F_{K ∪ H}` at the point `z` the value was taken at.
    pub fn spherical_derivative(&self, h: IndexSet, z: &ComplexPoint) -> Result<StemValue> {
        let mut beta_h = 1.0;
        for v in h.iter() {
            let b = z.beta(v);
            if b == 0.0 {
                return Err(Error::SingularPoint { var: v });
            }
            beta_h *= b;
        }
        let mut out = StemValue::zeros(self.n);
        for k in 0..self.comps.len() {
            if k as u32 & h.bits() == 0 {
                out.comps[k] = self.comps[k | h.bits() as usize] / beta_h;
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &StemValue) -> StemValue {
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| *a + *b)
            .collect();
        StemValue { n: self.n, comps }
    }

    pub fn sub(&self, o: &StemValue) -> StemValue {
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| *a - *b)
            .collect();
        StemValue { n: self.n, comps }
    }

    pub fn scale(&self, s: f64) -> StemValue {
        StemValue {
            n: self.n,
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Largest componentwise quaternion distance.
    pub fn max_diff(&self, o: &StemValue) -> f64 {
        self.comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn flatten(&self) -> Vec<f64> {
        self.comps.iter().flat_map(|q| q.to_array()).collect()
    }
}

/// Where a stem function's component structure comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form polynomial expression; exact and entire.
    Polynomial,
    /// A builtin leaf such as `exp` or a conjugate monomial.
    Builtin,
    /// Built from other stems by products, spherical operations or combinations.
    Derived,
}

/// Leaf kinds accepted by [`make_builtin_stem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinKind {
    /// `Z_j = alpha_j + e_j beta_j`, inducing `x_j`.
    Monomial(usize),
    /// `conj(Z_j) = alpha_j - e_j beta_j`, inducing `conj(x_j)`.
    ConjMonomial(usize),
    Constant(Quaternion),
    /// `e^{alpha_j}(cos beta_j + e_j sin beta_j)`, inducing `e^{x_j}`.
    Exp(usize),
}

#[derive(Debug)]
enum Node {
    Closed(ClosedForm),
    ConjMonomial(usize),
    ImVar(usize),
    Exp(usize),
    Tensor(StemFunction, StemFunction),
    SphericalValue(StemFunction, IndexSet),
    SphericalDerivative {
        inner: StemFunction,
        set: IndexSet,
        /// Closed form of the result when the inner stem is polynomial-backed.
        extension: Option<ClosedForm>,
    },
    Combination(Vec<(f64, StemFunction)>),
}

/// An immutable stem function of `n` complex variables.
#[derive(Debug, Clone)]
pub struct StemFunction {
    n: usize,
    node: Arc<Node>,
}

impl StemFunction {
    fn from_node(n: usize, node: Node) -> Self {
        Self {
            n,
            node: Arc::new(node),
        }
    }

    /// Polynomial-backed stem from a closed-form expression.
    pub fn closed(c: ClosedForm) -> Self {
        Self::from_node(c.n(), Node::Closed(c))
    }

    pub fn polynomial(p: &QPolynomial) -> Self {
        Self::closed(ClosedForm::from_poly(p))
    }

    pub fn constant(n: usize, q: Quaternion) -> Result<Self> {
        Ok(Self::polynomial(&QPolynomial::constant(n, q)?))
    }

    /// `Z_j`.
    pub fn monomial(n: usize, j: usize) -> Result<Self> {
        Ok(Self::polynomial(&QPolynomial::var(n, j)?))
    }

    /// `conj(Z_j)`.
    pub fn conj_monomial(n: usize, j: usize) -> Result<Self> {
        check_n(n)?;
        check_var(j, n)?;
        Ok(Self::from_node(n, Node::ConjMonomial(j)))
    }

    /// `Im(z_j)`: the stem `e_j beta_j` inducing `Im(x_j)`.
    pub fn im_var(n: usize, j: usize) -> Result<Self> {
        check_n(n)?;
        check_var(j, n)?;
        Ok(Self::from_node(n, Node::ImVar(j)))
    }

    pub fn exp(n: usize, j: usize) -> Result<Self> {
        check_n(n)?;
        check_var(j, n)?;
        Ok(Self::from_node(n, Node::Exp(j)))
    }

    /// `Z_K = Z_{k1} ⊗ ... ⊗ Z_{kp}` in increasing order, as a generic product.
    pub fn monomial_product(n: usize, k: IndexSet) -> Result<Self> {
        check_set(k, n)?;
        let mut acc = Self::constant(n, Quaternion::ONE)?;
        for j in k.iter() {
            acc = acc.tensor(&Self::monomial(n, j)?)?;
        }
        Ok(acc)
    }

    /// `conj(Z)_K` in increasing order.
    pub fn conj_monomial_product(n: usize, k: IndexSet) -> Result<Self> {
        check_set(k, n)?;
        let mut acc = Self::constant(n, Quaternion::ONE)?;
        for j in k.iter() {
            acc = acc.tensor(&Self::conj_monomial(n, j)?)?;
        }
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        match &*self.node {
            Node::Closed(_) => Provenance::Polynomial,
            Node::ConjMonomial(_) | Node::ImVar(_) | Node::Exp(_) => Provenance::Builtin,
            Node::SphericalDerivative {
                extension: Some(_), ..
            } => Provenance::Polynomial,
            _ => Provenance::Derived,
        }
    }

    /// Closed form of this stem, when it is polynomial-backed.
    pub fn closed_form(&self) -> Option<&ClosedForm> {
        match &*self.node {
            Node::Closed(c) => Some(c),
            Node::SphericalDerivative { extension, .. } => extension.as_ref(),
            _ => None,
        }
    }

    /// Variables `h` for which `beta_h = 0` lies outside the stem's formal domain.
    /// Polynomial-backed spherical derivatives still evaluate there through
    /// their closed form.
    pub fn domain_excludes(&self) -> IndexSet {
        match &*self.node {
            Node::Closed(_) | Node::ConjMonomial(_) | Node::ImVar(_) | Node::Exp(_) => {
                IndexSet::EMPTY
            }
            Node::Tensor(a, b) => a.domain_excludes().union(b.domain_excludes()),
            Node::SphericalValue(f, _) => f.domain_excludes(),
            Node::SphericalDerivative { inner, set, .. } => inner.domain_excludes().union(*set),
            Node::Combination(parts) => parts
                .iter()
                .fold(IndexSet::EMPTY, |s, (_, f)| s.union(f.domain_excludes())),
        }
    }

    pub fn eval(&self, z: &ComplexPoint) -> Result<StemValue> {
        if z.n() != self.n {
            return Err(Error::domain(format!(
                "point has {} coordinates, stem has {} variables",
                z.n(),
                self.n
            )));
        }
        let n = self.n;
        match &*self.node {
            Node::Closed(c) => Ok(c.stem_value(z)),
            Node::ConjMonomial(j) => {
                let mut v = StemValue::zeros(n);
                v.set(IndexSet::EMPTY, Quaternion::real(z.alpha(*j)));
                v.set(IndexSet::singleton(*j), Quaternion::real(-z.beta(*j)));
                Ok(v)
            }
            Node::ImVar(j) => {
                let mut v = StemValue::zeros(n);
                v.set(IndexSet::singleton(*j), Quaternion::real(z.beta(*j)));
                Ok(v)
            }
            Node::Exp(j) => {
                let ea = z.alpha(*j).exp();
                let b = z.beta(*j);
                let mut v = StemValue::zeros(n);
                v.set(IndexSet::EMPTY, Quaternion::real(ea * b.cos()));
                v.set(IndexSet::singleton(*j), Quaternion::real(ea * b.sin()));
                Ok(v)
            }
            Node::Tensor(a, b) => Ok(a.eval(z)?.tensor(&b.eval(z)?)),
            Node::SphericalValue(f, h) => Ok(f.eval(z)?.spherical_value(*h)),
            Node::SphericalDerivative {
                inner,
                set,
                extension,
            } => {
                let on_axis = set.iter().find(|&v| z.beta(v) == 0.0);
                match (on_axis, extension) {
                    (None, _) => inner.eval(z)?.spherical_derivative(*set, z),
                    (Some(_), Some(ext)) => Ok(ext.stem_value(z)),
                    (Some(v), None) => Err(Error::SingularPoint { var: v }),
                }
            }
            Node::Combination(parts) => {
                let mut acc = StemValue::zeros(n);
                for (w, f) in parts {
                    acc = acc.add(&f.eval(z)?.scale(*w));
                }
                Ok(acc)
            }
        }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StemFunction) -> Result<StemFunction> {
        self.check_same_n(other)?;
        Ok(Self::from_node(
            self.n,
            Node::Tensor(self.clone(), other.clone()),
        ))
    }

    /// `F°_H`.
    pub fn spherical_value(&self, h: IndexSet) -> Result<StemFunction> {
        check_set(h, self.n)?;
        Ok(Self::from_node(
            self.n,
            Node::SphericalValue(self.clone(), h),
        ))
    }

    /// `F'_H`. Polynomial-backed stems keep a closed form that extends to `beta_h = 0`.
    pub fn spherical_derivative(&self, h: IndexSet) -> Result<StemFunction> {
        check_set(h, self.n)?;
        let extension = self.closed_form().map(|c| c.spherical_derivative(h));
        Ok(Self::from_node(
            self.n,
            Node::SphericalDerivative {
                inner: self.clone(),
                set: h,
                extension,
            },
        ))
    }

    /// Real linear combination `sum w_i F_i`.
    pub fn combination(parts: Vec<(f64, StemFunction)>) -> Result<StemFunction> {
        let n = parts
            .first()
            .map(|(_, f)| f.n)
            .ok_or_else(|| Error::domain("empty linear combination"))?;
        if parts.iter().any(|(_, f)| f.n != n) {
            return Err(Error::domain(
                "linear combination of stems with different n",
            ));
        }
        Ok(Self::from_node(n, Node::Combination(parts)))
    }

    /// Bitmask over `K` of possibly nonzero components, known exactly for
    /// polynomial-backed and builtin stems.
    pub fn exact_support(&self) -> Result<u64> {
        match &*self.node {
            Node::Closed(c) => Ok(c.support()),
            Node::SphericalDerivative {
                extension: Some(c), ..
            } => Ok(c.support()),
            Node::ConjMonomial(j) | Node::Exp(j) => Ok(1 | 1u64 << (1u32 << (j - 1))),
            Node::ImVar(j) => Ok(1u64 << (1u32 << (j - 1))),
            _ => Err(Error::Capability(
                "component support is only known exactly for polynomial-backed or builtin stems"
                    .into(),
            )),
        }
    }

    fn check_same_n(&self, other: &StemFunction) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "variable counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

pub fn make_builtin_stem(n: usize, kind: BuiltinKind) -> Result<StemFunction> {
    match kind {
        BuiltinKind::Monomial(j) => StemFunction::monomial(n, j),
        BuiltinKind::ConjMonomial(j) => StemFunction::conj_monomial(n, j),
        BuiltinKind::Constant(q) => StemFunction::constant(n, q),
        BuiltinKind::Exp(j) => StemFunction::exp(n, j),
    }
}

pub fn stem_tensor(f: &StemFunction, g: &StemFunction) -> Result<StemFunction> {
    f.tensor(g)
}

pub fn stem_spherical_value(f: &StemFunction, h: IndexSet) -> Result<StemFunction> {
    f.spherical_value(h)
}

pub fn stem_spherical_derivative(f: &StemFunction, h: IndexSet) -> Result<StemFunction> {
    f.spherical_derivative(h)
}

/// Largest violation of the parity condition `F_K(z̄^h) = (-1)^{|K ∩ {h}|} F_K(z)` at `z`.
pub fn parity_residual(f: &StemFunction, z: &ComplexPoint) -> Result<f64> {
    let v = f.eval(z)?;
    let mut worst = 0.0f64;
    for h in 1..=f.n() {
        let w = f.eval(&z.conj_at(h))?;
        for k in IndexSet::all(f.n()) {
            let expect = if k.contains(h) { -v.get(k) } else { v.get(k) };
            worst = worst.max((w.get(k) - expect).norm());
        }
    }
    Ok(worst)
}

/// `max_M |(∂̄_h F)_M|` with `∂̄_h = (∂/∂alpha_h + J_h ∂/∂beta_h) / 2`, i.e. half the largest
/// violation of the Cauchy-Riemann system in variable `h`. Partials use Richardson-extrapolated
/// central differences with the given step.
pub fn stem_cr_residual(f: &StemFunction, h: usize, z: &ComplexPoint, step: f64) -> Result<f64> {
    check_var(h, f.n())?;
    let d_alpha = numdiff::first(
        |t| Ok(f.eval(&z.with_alpha(h, t))?.flatten()),
        z.alpha(h),
        step,
    )?;
    let d_beta = numdiff::first(
        |t| Ok(f.eval(&z.with_beta(h, t))?.flatten()),
        z.beta(h),
        step,
    )?;
    let q =
        |v: &[f64], k: usize| Quaternion::new(v[4 * k], v[4 * k + 1], v[4 * k + 2], v[4 * k + 3]);
    let hb = IndexSet::singleton(h).bits() as usize;
    let mut worst = 0.0f64;
    for k in 0..(1usize << f.n()) {
        if k & hb != 0 {
            continue;
        }
        let kh = k | hb;
        let r1 = (q(&d_alpha, k) - q(&d_beta, kh)).norm() / 2.0;
        let r2 = (q(&d_beta, k) + q(&d_alpha, kh)).norm() / 2.0;
        worst = worst.max(r1).max(r2);
    }
    Ok(worst)
}
