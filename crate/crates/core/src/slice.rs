//! Slice functions `f = I(F)` induced by stem functions, evaluated pointwise
//! as `f(x) = sum_K J_K F_K(z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{check_n, check_set, check_var, IndexSet};
use crate::poly::{ClosedForm, QPolynomial};
use crate::quat::{split, Quaternion, SplitForm};
use crate::stem::{ComplexPoint, Provenance, StemFunction};

/// A point `x = (x_1, ..., x_n)` of `H^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Quaternion>", into = "Vec<Quaternion>")]
pub struct QPoint {
    coords: Vec<Quaternion>,
}

impl TryFrom<Vec<Quaternion>> for QPoint {
    type Error = Error;
    fn try_from(coords: Vec<Quaternion>) -> Result<Self> {
        QPoint::new(coords)
    }
}

impl From<QPoint> for Vec<Quaternion> {
    fn from(p: QPoint) -> Self {
        p.coords
    }
}

impl QPoint {
    pub fn new(coords: Vec<Quaternion>) -> Result<Self> {
        check_n(coords.len())?;
        Ok(Self { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Quaternion] {
        &self.coords
    }

    pub fn get(&self, h: usize) -> Quaternion {
        self.coords[h - 1]
    }

    pub fn split(&self, h: usize) -> SplitForm {
        split(self.coords[h - 1])
    }

    /// The complex point `(alpha_h + i beta_h)_h` with `beta_h >= 0`.
    pub fn complex_point(&self) -> ComplexPoint {
        let pairs: Vec<(f64, f64)> = self
            .coords
            .iter()
            .map(|&q| {
                let s = split(q);
                (s.alpha, s.beta)
            })
            .collect();
        ComplexPoint::from_pairs(&pairs).expect("QPoint dimension already validated")
    }

    /// Same point with `J_h` replaced by `j`.
    pub fn with_j(&self, h: usize, j: Quaternion) -> QPoint {
        let s = self.split(h);
        let mut c = self.clone();
        c.coords[h - 1] = Quaternion::real(s.alpha) + j.scale(s.beta);
        c
    }

    pub fn with_coord(&self, h: usize, q: Quaternion) -> QPoint {
        let mut c = self.clone();
        c.coords[h - 1] = q;
        c
    }
}

/// `I(F)`.
#[derive(Debug, Clone)]
pub struct SliceFunction {
    stem: StemFunction,
}

impl SliceFunction {
    pub fn new(stem: StemFunction) -> Self {
        Self { stem }
    }

    pub fn from_poly(p: &QPolynomial) -> Self {
        Self::new(StemFunction::polynomial(p))
    }

    pub fn n(&self) -> usize {
        self.stem.n()
    }

    pub fn stem(&self) -> &StemFunction {
        &self.stem
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.stem.closed_form()
    }

    /// The polynomial this function equals, when its stem is a plain polynomial.
    pub fn as_polynomial(&self) -> Option<QPolynomial> {
        self.closed_form().and_then(ClosedForm::as_polynomial)
    }

    pub fn eval(&self, x: &QPoint) -> Result<Quaternion> {
        slice_eval(self, x)
    }

    pub fn spherical_value(&self, h: IndexSet) -> Result<SliceFunction> {
        Ok(Self::new(self.stem.spherical_value(h)?))
    }

    pub fn spherical_derivative(&self, h: IndexSet) -> Result<SliceFunction> {
        Ok(Self::new(self.stem.spherical_derivative(h)?))
    }

    /// `self ⊙ other`.
    pub fn slice_product(&self, other: &SliceFunction) -> Result<SliceFunction> {
        Ok(Self::new(self.stem.tensor(&other.stem)?))
    }
}

/// `f(x) = sum_K J_K F_K(z)`, with `J_K` the ordered product of the unit imaginaries.
pub fn slice_eval(f: &SliceFunction, x: &QPoint) -> Result<Quaternion> {
    let n = f.n();
    if x.n() != n {
        return Err(Error::domain(format!(
            "point has {} coordinates, function has {n} variables",
            x.n()
        )));
    }
    let js: Vec<Quaternion> = (1..=n).map(|h| x.split(h).j).collect();
    let value = f.stem.eval(&x.complex_point())?;
    let comps = value.comps();
    let mut jk = vec![Quaternion::ONE; comps.len()];
    let mut acc = comps[0];
    for k in 1..comps.len() {
        let top = 31 - (k as u32).leading_zeros() as usize;
        jk[k] = jk[k & !(1 << top)] * js[top];
        acc += jk[k] * comps[k];
    }
    Ok(acc)
}

pub fn slice_product(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction> {
    f.slice_product(g)
}

/// `|f(x) - f(x')|` where `x'` replaces `J_h` by `jprime`.
pub fn circularity_residual(
    f: &SliceFunction,
    h: usize,
    x: &QPoint,
    jprime: Quaternion,
) -> Result<f64> {
    check_var(h, f.n())?;
    if (jprime * jprime + Quaternion::ONE).norm() > 1e-12 {
        return Err(Error::domain("jprime must be a unit imaginary quaternion"));
    }
    Ok((f.eval(x)? - f.eval(&x.with_j(h, jprime))?).norm())
}

/// Which support condition [`sliceness_check`] tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportShape {
    /// `S_H`: components on `K ⊂ H^c`, plus `e_h e_Q` with `h ∈ H`, `Q ⊂ {h+1..n} \ H`.
    Slice,
    /// `S_{c,H}`: components on `K ⊂ H^c` only.
    Circular,
}

/// Whether the exact component support of `F` has the `S_H` or `S_{c,H}` shape.
/// The slice shape is taken literally and is therefore sensitive to the order of `h`.
pub fn sliceness_check(f: &StemFunction, h: IndexSet, shape: SupportShape) -> Result<bool> {
    check_set(h, f.n())?;
    if f.provenance() == Provenance::Derived && f.closed_form().is_none() {
        return Err(Error::Capability(
            "sliceness is decided on exact support; derived stems do not carry it".into(),
        ));
    }
    let support = f.exact_support()?;
    let n = f.n();
    let allowed = |k: IndexSet| -> bool {
        if k.intersection(h).is_empty() {
            return true;
        }
        if shape == SupportShape::Circular {
            return false;
        }
        let kh = k.intersection(h);
        if kh.len() != 1 {
            return false;
        }
        let top = kh.min().unwrap();
        let above = IndexSet::full(n)
            .difference(IndexSet::interval(top))
            .difference(h);
        k.without(top).is_subset(above)
    };
    Ok(IndexSet::all(n).all(|k| support & (1u64 << k.bits()) == 0 || allowed(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Term;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn poly(n: usize, terms: &[(&[u32], Quaternion)]) -> QPolynomial {
        QPolynomial::new(
            n,
            terms
                .iter()
                .map(|(a, c)| Term {
                    alpha: a.to_vec(),
                    coeff: *c,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn eval_of_product_stem_at_imaginary_units() {
        let f = SliceFunction::new(
            StemFunction::monomial(2, 1)
                .unwrap()
                .tensor(&StemFunction::monomial(2, 2).unwrap())
                .unwrap(),
        );
        let x = QPoint::new(vec![Quaternion::I, Quaternion::J]).unwrap();
        assert!((f.eval(&x).unwrap() - Quaternion::K).norm() < 1e-15);
    }

    #[test]
    fn eval_trivial_examples() {
        let a = q(1.0, -2.0, 0.5, 3.0);
        let c = SliceFunction::new(StemFunction::constant(2, a).unwrap());
        let x = QPoint::new(vec![q(0.3, 1.0, 2.0, 0.0), q(-1.0, 0.0, 0.0, 4.0)]).unwrap();
        assert_eq!(c.eval(&x).unwrap(), a);
        let id = SliceFunction::new(StemFunction::monomial(1, 1).unwrap());
        let p = QPoint::new(vec![q(3.0, 4.0, 0.0, 0.0)]).unwrap();
        assert!((id.eval(&p).unwrap() - q(3.0, 4.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_stem_matches_ordered_evaluation() {
        let p = poly(
            3,
            &[
                (&[2, 1, 0], q(0.5, -1.0, 0.25, 0.0)),
                (&[1, 0, 3], q(0.0, 0.0, 1.0, -0.5)),
                (&[0, 2, 2], q(-0.3, 0.1, 0.0, 0.7)),
            ],
        );
        let f = SliceFunction::from_poly(&p);
        let x = QPoint::new(vec![
            q(0.3, 0.4, -0.2, 0.9),
            q(-1.1, 0.0, 0.6, 0.2),
            q(0.5, -0.7, 0.1, 0.3),
        ])
        .unwrap();
        let direct = p.eval(x.coords()).unwrap();
        assert!((f.eval(&x).unwrap() - direct).norm() < 1e-13);
    }

    #[test]
    fn slice_product_swaps_for_conjugate_left_factor() {
        let xb2 = SliceFunction::new(StemFunction::conj_monomial(2, 2).unwrap());
        let x1 = SliceFunction::new(StemFunction::monomial(2, 1).unwrap());
        let prod = xb2.slice_product(&x1).unwrap();
        let x = QPoint::new(vec![q(0.3, 0.4, -0.2, 0.9), q(-1.1, 0.5, 0.6, 0.2)]).unwrap();
        let expect = x.get(1) * x.get(2).conj();
        assert!((prod.eval(&x).unwrap() - expect).norm() < 1e-14);

        let sq = x1.slice_product(&x1).unwrap();
        assert!((sq.eval(&x).unwrap() - x.get(1) * x.get(1)).norm() < 1e-14);
    }

    #[test]
    fn circularity_examples() {
        let x2 = SliceFunction::new(StemFunction::monomial(2, 2).unwrap());
        let x = QPoint::new(vec![q(0.3, 0.4, -0.2, 0.9), q(-1.1, 0.5, 0.6, 0.2)]).unwrap();
        assert_eq!(
            circularity_residual(&x2, 1, &x, Quaternion::K).unwrap(),
            0.0
        );

        let x1 = SliceFunction::new(StemFunction::monomial(1, 1).unwrap());
        let p = QPoint::new(vec![Quaternion::I]).unwrap();
        let r = circularity_residual(&x1, 1, &p, Quaternion::J).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);

        // 2 alpha_1 x_2
        let c = ClosedForm::component(
            &poly(2, &[(&[1, 1], Quaternion::ONE)]),
            IndexSet::singleton(1),
            IndexSet::singleton(1),
        )
        .unwrap();
        let s = SliceFunction::new(StemFunction::closed(c));
        let j = q(0.0, 0.6, 0.0, 0.8);
        assert!(circularity_residual(&s, 1, &x, j).unwrap() < 1e-15);
        assert!(circularity_residual(&s, 1, &x, Quaternion::I.scale(2.0)).is_err());
    }

    #[test]
    fn sliceness_examples() {
        let x1x2 = StemFunction::polynomial(&poly(2, &[(&[1, 1], Quaternion::ONE)]));
        assert!(!sliceness_check(&x1x2, IndexSet::singleton(2), SupportShape::Slice).unwrap());
        let x2c = StemFunction::polynomial(&poly(2, &[(&[0, 3], Quaternion::ONE)]));
        assert!(sliceness_check(&x2c, IndexSet::singleton(2), SupportShape::Slice).unwrap());
        assert!(!sliceness_check(&x2c, IndexSet::singleton(2), SupportShape::Circular).unwrap());
        let c = ClosedForm::component(
            &poly(2, &[(&[1, 1], Quaternion::ONE)]),
            IndexSet::singleton(1),
            IndexSet::singleton(1),
        )
        .unwrap();
        let s = StemFunction::closed(c);
        assert!(sliceness_check(&s, IndexSet::singleton(1), SupportShape::Circular).unwrap());
        // x1 x2 is slice in x1: F_{12} = e_1 e_2 with Q = {2} above 1
        assert!(sliceness_check(&x1x2, IndexSet::singleton(1), SupportShape::Slice).unwrap());

        let derived = x1x2.tensor(&x1x2).unwrap();
        assert!(matches!(
            sliceness_check(&derived, IndexSet::singleton(1), SupportShape::Slice),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn qpoint_json_roundtrip() {
        let x: QPoint = serde_json::from_str("[[1,0,0,0],[0,1,0,0]]").unwrap();
        assert_eq!(x.n(), 2);
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            "[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]]"
        );
        assert!(serde_json::from_str::<QPoint>("[]").is_err());
    }
}
