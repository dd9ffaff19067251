//! Almansi components `S^H_K(f) = (x_K ⊙ f)'_{s,H}` and the decompositions
//! `f = sum_{K ⊂ H} (-1)^{|H \ K|} (x̄)_{H \ K} ⊙ S^H_K(f)`.

use serde_json::{json, Map, Value};

use crate::calculus::crf_apply;
use crate::error::{Error, Result};
use crate::index::{check_set, IndexSet};
use crate::poly::{poly_slice_product, ClosedForm, QPolynomial, RealPolyMap};
use crate::quat::{ordered_product, Quaternion};
use crate::slice::{QPoint, SliceFunction};
use crate::stem::{ComplexPoint, StemFunction, StemValue};

/// How the conjugate monomials multiply the components in a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructMode {
    /// `(x̄)_{H\K} ⊙ S^H_K(f)`, valid for every `H`.
    Slice,
    /// Ordinary pointwise products; needs `H = {1, ..., m}`.
    OrderedPointwise,
}

fn check_k(h: IndexSet, k: IndexSet) -> Result<()> {
    if !k.is_subset(h) {
        return Err(Error::domain(format!("K = {k} is not a subset of H = {h}")));
    }
    Ok(())
}

/// `S^H_K(f)` by the iterated definition. Polynomial sources multiply by `x_K`
/// exactly and keep a closed-form extension to the real slices; other sources go
/// through the generic tensor product.
pub fn almansi_component(f: &SliceFunction, h: IndexSet, k: IndexSet) -> Result<SliceFunction> {
    let n = f.n();
    check_set(h, n)?;
    check_k(h, k)?;
    if h.is_empty() {
        return Ok(f.clone());
    }
    let product = match f.as_polynomial() {
        Some(p) => {
            let mut alpha = vec![0u32; n];
            for j in k.iter() {
                alpha[j - 1] = 1;
            }
            StemFunction::polynomial(&poly_slice_product(
                &QPolynomial::monomial(alpha, Quaternion::ONE)?,
                &p,
            )?)
        }
        None => StemFunction::monomial_product(n, k)?.tensor(f.stem())?,
    };
    Ok(SliceFunction::new(product.spherical_derivative(h)?))
}

/// `G^H_K(F)(z) = sum_{T ⊂ H^c} e_T sum_{L ⊂ K} alpha_{K\L} beta_{H\L}^{-1} F_{(T ∪ H) \ L}(z)`.
pub fn almansi_component_explicit(
    f: &StemFunction,
    h: IndexSet,
    k: IndexSet,
    z: &ComplexPoint,
) -> Result<StemValue> {
    let n = f.n();
    check_set(h, n)?;
    check_k(h, k)?;
    if let Some(v) = h.iter().find(|&v| z.beta(v) == 0.0) {
        return Err(Error::SingularPoint { var: v });
    }
    let fz = f.eval(z)?;
    let prod = |s: IndexSet, g: &dyn Fn(usize) -> f64| s.iter().map(g).product::<f64>();
    let mut out = StemValue::zeros(n);
    for t in h.complement(n).subsets() {
        let mut acc = Quaternion::ZERO;
        for l in k.subsets() {
            let w = prod(k.difference(l), &|j| z.alpha(j)) / prod(h.difference(l), &|j| z.beta(j));
            acc += fz.get(t.union(h).difference(l)).scale(w);
        }
        out.set(t, acc);
    }
    Ok(out)
}

/// All `2^{|H|}` components of `f` for one choice of `H`.
#[derive(Debug, Clone)]
pub struct AlmansiDecomposition {
    h: IndexSet,
    source: SliceFunction,
    components: Vec<(IndexSet, SliceFunction)>,
    closed: Option<Vec<ClosedForm>>,
}

impl AlmansiDecomposition {
    pub fn h(&self) -> IndexSet {
        self.h
    }

    pub fn source(&self) -> &SliceFunction {
        &self.source
    }

    /// Components ordered by the bitmask of `K`.
    pub fn components(&self) -> &[(IndexSet, SliceFunction)] {
        &self.components
    }

    pub fn component(&self, k: IndexSet) -> Option<&SliceFunction> {
        self.components
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, s)| s)
    }

    /// Product-form closed expressions, aligned with [`Self::components`], for polynomial sources.
    pub fn closed_forms(&self) -> Option<&[ClosedForm]> {
        self.closed.as_deref()
    }

    pub fn to_json(&self) -> Value {
        let mut comps = Map::new();
        for (idx, (k, _)) in self.components.iter().enumerate() {
            let v = match &self.closed {
                Some(c) => Value::String(c[idx].to_string()),
                None => Value::String("numeric".into()),
            };
            comps.insert(k.bits().to_string(), v);
        }
        json!({ "H": self.h.to_vec(), "components": comps })
    }

    pub fn reconstruct(&self, x: &QPoint, mode: ReconstructMode) -> Result<Quaternion> {
        almansi_reconstruct(self, x, mode)
    }
}

pub fn almansi_decompose(f: &SliceFunction, h: IndexSet) -> Result<AlmansiDecomposition> {
    check_set(h, f.n())?;
    let components = h
        .subsets()
        .map(|k| Ok((k, almansi_component(f, h, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let closed = match f.as_polynomial() {
        Some(p) => Some(
            h.subsets()
                .map(|k| ClosedForm::component(&p, h, k))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(AlmansiDecomposition {
        h,
        source: f.clone(),
        components,
        closed,
    })
}

/// `sum_{K ⊂ H} (-1)^{|H\K|} (x̄)_{H\K} · S^H_K(f)` at `x`.
pub fn almansi_reconstruct(
    dec: &AlmansiDecomposition,
    x: &QPoint,
    mode: ReconstructMode,
) -> Result<Quaternion> {
    let n = dec.source.n();
    let h = dec.h;
    if mode == ReconstructMode::OrderedPointwise && !h.is_initial_interval() {
        return Err(Error::Mode(format!(
            "pointwise reconstruction needs H = {{1,...,m}}, got H = {h}"
        )));
    }
    let conj: Vec<Quaternion> = x.coords().iter().map(|q| q.conj()).collect();
    let mut acc = Quaternion::ZERO;
    for (k, s) in &dec.components {
        let rest = h.difference(*k);
        let term = match mode {
            ReconstructMode::Slice => {
                let left = SliceFunction::new(StemFunction::conj_monomial_product(n, rest)?);
                left.slice_product(s)?.eval(x)?
            }
            ReconstructMode::OrderedPointwise => ordered_product(&conj, rest)? * s.eval(x)?,
        };
        acc += term.scale(rest.sign());
    }
    Ok(acc)
}

/// Stem-level reconstruction `sum_{K ⊂ H} (-1)^{|H\K|} Z̄_{H\K} ⊗ G^H_K(F)` at `z`.
pub fn stem_reconstruct(f: &StemFunction, h: IndexSet, z: &ComplexPoint) -> Result<StemValue> {
    let n = f.n();
    check_set(h, n)?;
    let mut acc = StemValue::zeros(n);
    for k in h.subsets() {
        let rest = h.difference(k);
        let zbar = StemFunction::conj_monomial_product(n, rest)?.eval(z)?;
        let g = almansi_component_explicit(f, h, k, z)?;
        acc = acc.add(&zbar.tensor(&g).scale(rest.sign()));
    }
    Ok(acc)
}

/// `S^m_K(P)` as an exact real-coordinate map via
/// `(-1)^m ∂̄_{x_m}(x_m^{χ_K(m)} ... ∂̄_{x_1}(x_1^{χ_K(1)} P) ...)`.
pub fn crf_component_map(p: &QPolynomial, m: usize, k: IndexSet) -> Result<RealPolyMap> {
    let n = p.n();
    if m == 0 || m > n {
        return Err(Error::domain(format!("m = {m} out of range 1..={n}")));
    }
    check_k(IndexSet::interval(m), k)?;
    let mut map = ClosedForm::from_poly(p).to_real_map()?;
    for j in 1..=m {
        if k.contains(j) {
            map = RealPolyMap::variable(n, j).mul(&map);
        }
        map = crf_apply(&map, j, true);
    }
    Ok(if m % 2 == 1 { -&map } else { map })
}

pub fn crf_component(p: &QPolynomial, m: usize, k: IndexSet, x: &QPoint) -> Result<Quaternion> {
    if x.n() != p.n() {
        return Err(Error::domain(
            "point dimension does not match the polynomial",
        ));
    }
    Ok(crf_component_map(p, m, k)?.eval(x.coords()))
}

/// Reduced ordered decomposition for `f` depending only on `x_h, ..., x_n`:
/// `sum_{K ⊂ {1..h-1}} (-1)^{|K^c|} x̄_{K^c} S^h_{K ∪ {h}}(f) - x̄_h S^h_{1..h-1}(f)`.
pub fn reduced_ordered_reconstruct(dec: &AlmansiDecomposition, x: &QPoint) -> Result<Quaternion> {
    let h = dec.h;
    if h.is_empty() || !h.is_initial_interval() {
        return Err(Error::Mode(format!(
            "the reduced decomposition needs H = {{1,...,h}}, got {h}"
        )));
    }
    let top = h.max().unwrap();
    if let Some(p) = dec.source.as_polynomial() {
        if !p.uses_only_vars_from(top) {
            return Err(Error::domain(format!(
                "the reduced decomposition needs a function of x_{top}, ..., x_n only"
            )));
        }
    }
    let lower = IndexSet::interval(top - 1);
    let conj: Vec<Quaternion> = x.coords().iter().map(|q| q.conj()).collect();
    let get = |k: IndexSet| {
        dec.component(k)
            .expect("all subsets of H are present")
            .eval(x)
    };
    let mut acc = -(conj[top - 1] * get(lower)?);
    for k in lower.subsets() {
        let kc = lower.difference(k);
        acc += (ordered_product(&conj, kc)? * get(k.with(top))?).scale(kc.sign());
    }
    Ok(acc)
}
