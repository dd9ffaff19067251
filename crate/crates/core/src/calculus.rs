//! Cauchy-Riemann-Fueter operators and Laplacians, exact on real-coordinate
//! polynomial maps and by finite differences on general slice functions.
//!
//! Convention: `∂̄_{x_h} = (∂_α + i ∂_β + j ∂_γ + k ∂_δ) / 2` acting by left
//! multiplication, `∂_{x_h}` the same with minus signs, so `Δ_h = 4 ∂_{x_h} ∂̄_{x_h}`.

use crate::error::{Error, Result};
use crate::index::{check_var, IndexSet};
use crate::numdiff;
use crate::poly::{coord_index, ClosedForm, QPolynomial, RealPolyMap};
use crate::quat::Quaternion;
use crate::slice::{sliceness_check, QPoint, SliceFunction, SupportShape};
use crate::stem::StemFunction;

const UNITS: [Quaternion; 4] = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];

/// `∂̄_{x_h} M` when `conjugated`, otherwise `∂_{x_h} M`.
pub fn crf_apply(m: &RealPolyMap, h: usize, conjugated: bool) -> RealPolyMap {
    let sign = if conjugated { 1.0 } else { -1.0 };
    let mut acc = m.partial(coord_index(h, 0));
    for (c, unit) in UNITS.iter().enumerate().skip(1) {
        acc = &acc + &m.partial(coord_index(h, c)).left_mul(unit.scale(sign));
    }
    acc.scale(0.5)
}

/// `Δ_h M`, the sum of the four pure second partials in the coordinates of `x_h`.
pub fn laplacian(m: &RealPolyMap, h: usize) -> RealPolyMap {
    (0..4).fold(RealPolyMap::zero(m.n()), |acc, c| {
        let v = coord_index(h, c);
        &acc + &m.partial(v).partial(v)
    })
}

/// Operator evaluated by [`fd_directional`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOperator {
    /// `∂_{x_h}`.
    Crf,
    /// `∂̄_{x_h}`.
    CrfConj,
    Laplacian,
}

/// `op` in variable `h` applied to `f` at `x` by Richardson-extrapolated central
/// differences; error `O(step^4)`. `step` defaults to `1e-3 (1 + |coordinate|)`.
pub fn fd_directional(
    f: &SliceFunction,
    h: usize,
    x: &QPoint,
    op: FdOperator,
    step: Option<f64>,
) -> Result<Quaternion> {
    check_var(h, f.n())?;
    let base = x.get(h).to_array();
    let mut parts = [Quaternion::ZERO; 4];
    for (c, part) in parts.iter_mut().enumerate() {
        let eval = |t: f64| -> Result<Vec<f64>> {
            let mut coords = base;
            coords[c] = t;
            Ok(f.eval(&x.with_coord(h, Quaternion::from_array(coords)))?
                .to_array()
                .to_vec())
        };
        let s = step.unwrap_or_else(|| numdiff::default_step(base[c]));
        let d = match op {
            FdOperator::Laplacian => numdiff::second(eval, base[c], s)?,
            _ => numdiff::first(eval, base[c], s)?,
        };
        *part = Quaternion::new(d[0], d[1], d[2], d[3]);
    }
    Ok(match op {
        FdOperator::Laplacian => parts.iter().copied().sum(),
        FdOperator::Crf | FdOperator::CrfConj => {
            let sign = if op == FdOperator::CrfConj { 1.0 } else { -1.0 };
            let s: Quaternion = (1..4).map(|c| UNITS[c].scale(sign) * parts[c]).sum();
            (parts[0] + s).scale(0.5)
        }
    })
}

/// Result of applying a differential operator: exact when the input is polynomial.
#[derive(Debug, Clone)]
pub enum DiffOpResult {
    Exact(RealPolyMap),
    Sampled(Vec<(QPoint, Quaternion)>),
}

impl DiffOpResult {
    pub fn is_exact(&self) -> bool {
        matches!(self, DiffOpResult::Exact(_))
    }

    /// Value at `x`: exact maps evaluate anywhere, sampled tables only at their own points.
    pub fn value_at(&self, x: &QPoint) -> Option<Quaternion> {
        match self {
            DiffOpResult::Exact(m) => Some(m.eval(x.coords())),
            DiffOpResult::Sampled(table) => table.iter().find(|(p, _)| p == x).map(|(_, v)| *v),
        }
    }
}

/// Applies `op` to `f`: exactly if `f` has a closed form, else by finite differences at `points`.
pub fn apply_operator(
    f: &SliceFunction,
    h: usize,
    op: FdOperator,
    points: &[QPoint],
) -> Result<DiffOpResult> {
    check_var(h, f.n())?;
    if let Some(c) = f.closed_form() {
        let m = c.to_real_map()?;
        return Ok(DiffOpResult::Exact(match op {
            FdOperator::Crf => crf_apply(&m, h, false),
            FdOperator::CrfConj => crf_apply(&m, h, true),
            FdOperator::Laplacian => laplacian(&m, h),
        }));
    }
    let table = points
        .iter()
        .map(|x| Ok((x.clone(), fd_directional(f, h, x, op, None)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffOpResult::Sampled(table))
}

/// Exact real-coordinate map of `S^H_K(P)` from its product form.
pub fn component_map(p: &QPolynomial, h: IndexSet, k: IndexSet) -> Result<RealPolyMap> {
    ClosedForm::component(p, h, k)?.to_real_map()
}

/// Largest coefficient of `∂̄_{x_m} Δ_m P`. For `m > 1` the polynomial must depend
/// on `x_m, ..., x_n` only, so that it is slice regular in `x_m`.
pub fn fueter_residual(p: &QPolynomial, m: usize) -> Result<f64> {
    check_var(m, p.n())?;
    if m > 1 && !p.uses_only_vars_from(m) {
        return Err(Error::domain(format!(
            "the Fueter check in x_{m} needs a polynomial slice in x_{m}: use only variables x_{m}, ..., x_n"
        )));
    }
    let map = ClosedForm::from_poly(p).to_real_map()?;
    Ok(crf_apply(&laplacian(&map, m), m, true).max_abs_coeff())
}

/// Largest coefficient of `Δ_m Δ_m P`.
pub fn biharmonic_residual(p: &QPolynomial, m: usize) -> Result<f64> {
    check_var(m, p.n())?;
    let map = ClosedForm::from_poly(p).to_real_map()?;
    Ok(laplacian(&laplacian(&map, m), m).max_abs_coeff())
}

/// Largest coefficient of `∂̄_{x_h} P + P'_{s,h}`. The identity needs `P` slice in `x_h`,
/// which every polynomial is for `h = 1`.
pub fn spherical_crf_residual(p: &QPolynomial, h: usize) -> Result<f64> {
    check_var(h, p.n())?;
    let c = ClosedForm::from_poly(p);
    let stem = StemFunction::closed(c.clone());
    if !sliceness_check(&stem, IndexSet::singleton(h), SupportShape::Slice)? {
        return Err(Error::domain(format!("polynomial is not slice in x_{h}")));
    }
    let lhs = crf_apply(&c.to_real_map()?, h, true);
    let rhs = c
        .spherical_derivative(IndexSet::singleton(h))
        .to_real_map()?;
    Ok((&lhs + &rhs).max_abs_coeff())
}

/// `-4 sum_{K ⊂ {1..m-1}} (-1)^{|K^c|} (x̄)_{K^c} ∂_{x_m} S^m_K(P)`, which equals `Δ_m P`.
pub fn laplacian_sum_rhs(p: &QPolynomial, m: usize) -> Result<RealPolyMap> {
    let n = p.n();
    check_var(m, n)?;
    let hm = IndexSet::interval(m);
    let lower = IndexSet::interval(m - 1);
    let mut acc = RealPolyMap::zero(n);
    for k in lower.subsets() {
        let kc = lower.difference(k);
        let left = kc
            .iter()
            .fold(RealPolyMap::constant(n, Quaternion::ONE), |l, j| {
                l.mul(&RealPolyMap::conj_variable(n, j))
            });
        let d = crf_apply(&component_map(p, hm, k)?, m, false);
        acc = &acc + &left.mul(&d).scale(kc.sign());
    }
    Ok(acc.scale(-4.0))
}

/// Largest coefficient of `Δ_m P - laplacian_sum_rhs(P, m)`.
pub fn laplacian_sum_residual(p: &QPolynomial, m: usize) -> Result<f64> {
    let lhs = laplacian(&ClosedForm::from_poly(p).to_real_map()?, m);
    Ok((&lhs - &laplacian_sum_rhs(p, m)?).max_abs_coeff())
}
