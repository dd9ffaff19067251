//! Monte Carlo verification of the mean-value and Poisson formulas on products of `S^3`.
//!
//! Samples are drawn in fixed-size blocks. Block `b` uses its own ChaCha stream
//! `(seed, b)`, and block moments are merged in block order, so an estimate
//! depends only on `(seed, nsamples)` and never on the thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{check_set, IndexSet};
use crate::poly::{ClosedForm, QPolynomial};
use crate::quat::{ordered_product, Quaternion};
use crate::slice::QPoint;

const BLOCK: u64 = 4096;

/// Absolute floor of the statistical acceptance band.
pub const ABS_FLOOR: f64 = 1e-3;

/// A uniformly distributed unit quaternion (normalized 4D Gaussian).
pub fn sample_s3<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let v = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-10 {
            return v / n;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: Quaternion,
    /// Largest componentwise standard error of the mean.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: u64,
    mean: [f64; 4],
    m2: [f64; 4],
}

impl Moments {
    const EMPTY: Moments = Moments {
        n: 0,
        mean: [0.0; 4],
        m2: [0.0; 4],
    };

    fn push(&mut self, q: Quaternion) {
        self.n += 1;
        let x = q.to_array();
        for (c, xc) in x.into_iter().enumerate() {
            let d = xc - self.mean[c];
            self.mean[c] += d / self.n as f64;
            self.m2[c] += d * (xc - self.mean[c]);
        }
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let (na, nb) = (self.n as f64, o.n as f64);
        let mut out = Moments {
            n,
            ..Moments::EMPTY
        };
        for c in 0..4 {
            let d = o.mean[c] - self.mean[c];
            out.mean[c] = self.mean[c] + d * nb / n as f64;
            out.m2[c] = self.m2[c] + o.m2[c] + d * d * na * nb / n as f64;
        }
        out
    }
}

/// Mean of `integrand(λ_1, ..., λ_draws)` over `nsamples` independent draws of `(S^3)^draws`.
pub fn mc_estimate<F>(draws: usize, nsamples: u64, seed: u64, integrand: F) -> Result<MCEstimate>
where
    F: Fn(&[Quaternion]) -> Result<Quaternion> + Sync,
{
    if nsamples == 0 {
        return Err(Error::domain("nsamples must be positive"));
    }
    let blocks = nsamples.div_ceil(BLOCK);
    let parts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BLOCK.min(nsamples - b * BLOCK);
            let mut lam = vec![Quaternion::ZERO; draws];
            let mut mom = Moments::EMPTY;
            for _ in 0..count {
                for l in lam.iter_mut() {
                    *l = sample_s3(&mut rng);
                }
                mom.push(integrand(&lam)?);
            }
            Ok(mom)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = parts.into_iter().fold(Moments::EMPTY, Moments::merge);
    let n = total.n as f64;
    let stderr = total
        .m2
        .iter()
        .map(|&m2| (m2 / (n - 1.0).max(1.0)).sqrt() / n.sqrt())
        .fold(0.0, f64::max);
    Ok(MCEstimate {
        value: Quaternion::from_array(total.mean),
        stderr,
        samples: total.n,
        seed,
    })
}

/// Exact left side and Monte Carlo right side of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub lhs: Quaternion,
    pub rhs: MCEstimate,
}

impl IntegralCheck {
    /// Acceptance band `max(3 stderr, 1e-3)`.
    pub fn tolerance(&self) -> f64 {
        (3.0 * self.rhs.stderr).max(ABS_FLOOR)
    }

    /// Largest componentwise `|lhs - rhs|`.
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs.value).max_abs()
    }

    pub fn passes(&self) -> bool {
        self.discrepancy() <= self.tolerance()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanValueFormula {
    /// Mean value of a single component `S^H_K(f)` over `(S^3)^{|H|}`.
    Components { h: IndexSet, k: IndexSet },
    /// `f(a) = sum_K (-1)^{|K^c|} ā_{K^c} ∫ S^m_K(f)(a + sum r_i λ_i)`.
    First,
    /// `f(a) = sum_{j<m} r_{1..j} ∫ λ̄_{1..j} S^j_∅(f)(a + sum_{i≤j+1} r_i λ_i) + r_{1..m} ∫ λ̄_{1..m} S^m_∅(f)(...)`.
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonFormula {
    First,
    Second,
}

fn validate(p: &QPolynomial, a: &QPoint, r: &[f64], m: usize) -> Result<()> {
    let n = p.n();
    if a.n() != n {
        return Err(Error::domain(format!(
            "center has {} coordinates, polynomial has {n} variables",
            a.n()
        )));
    }
    if m == 0 || m > n {
        return Err(Error::domain(format!("m = {m} out of range 1..={n}")));
    }
    if r.len() != n {
        return Err(Error::domain(format!(
            "expected {n} radii, got {}",
            r.len()
        )));
    }
    if let Some(bad) = r.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::domain(format!(
            "radius {bad} is not a nonnegative finite number"
        )));
    }
    Ok(())
}

/// `S^{1..j}_∅(P)` for `j = 0..=m`.
fn empty_components(p: &QPolynomial, m: usize) -> Result<Vec<ClosedForm>> {
    (0..=m)
        .map(|j| ClosedForm::component(p, IndexSet::interval(j), IndexSet::EMPTY))
        .collect()
}

/// `a` with coordinates `i <= upto` replaced by `a_i + r_i λ_i`, others taken from `rest`.
fn shifted(
    a: &[Quaternion],
    r: &[f64],
    lam: &[Quaternion],
    upto: usize,
    rest: &[Quaternion],
) -> Vec<Quaternion> {
    (0..a.len())
        .map(|i| {
            if i < upto {
                a[i] + lam[i].scale(r[i])
            } else {
                rest[i]
            }
        })
        .collect()
}

fn conj_all(q: &[Quaternion]) -> Vec<Quaternion> {
    q.iter().map(|v| v.conj()).collect()
}

pub fn mean_value_check(
    p: &QPolynomial,
    a: &QPoint,
    r: &[f64],
    m: usize,
    formula: MeanValueFormula,
    nsamples: u64,
    seed: u64,
) -> Result<IntegralCheck> {
    validate(p, a, r, m)?;
    let ac = a.coords();
    match formula {
        MeanValueFormula::Components { h, k } => {
            check_set(h, p.n())?;
            let s = ClosedForm::component(p, h, k)?;
            let vars = h.to_vec();
            let lhs = s.eval(ac)?;
            let rhs = mc_estimate(vars.len(), nsamples, seed, |lam| {
                let mut pt = ac.to_vec();
                for (l, &v) in lam.iter().zip(&vars) {
                    pt[v - 1] = ac[v - 1] + l.scale(r[v - 1]);
                }
                s.eval(&pt)
            })?;
            Ok(IntegralCheck { lhs, rhs })
        }
        MeanValueFormula::First => {
            let hm = IndexSet::interval(m);
            let abar = conj_all(ac);
            let parts = hm
                .subsets()
                .map(|k| {
                    let kc = hm.difference(k);
                    Ok((
                        ordered_product(&abar, kc)?.scale(kc.sign()),
                        ClosedForm::component(p, hm, k)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let lhs = p.eval(ac)?;
            let rhs = mc_estimate(m, nsamples, seed, |lam| {
                let pt = shifted(ac, r, lam, m, ac);
                let mut acc = Quaternion::ZERO;
                for (w, s) in &parts {
                    acc += *w * s.eval(&pt)?;
                }
                Ok(acc)
            })?;
            Ok(IntegralCheck { lhs, rhs })
        }
        MeanValueFormula::Second => {
            let comps = empty_components(p, m)?;
            let lhs = p.eval(ac)?;
            let rhs = mc_estimate(m, nsamples, seed, |lam| {
                let lbar = conj_all(lam);
                let mut acc = Quaternion::ZERO;
                for (j, comp) in comps.iter().enumerate() {
                    let upto = (j + 1).min(m);
                    let pt = shifted(ac, r, lam, upto, ac);
                    let set = IndexSet::interval(j);
                    let weight =
                        ordered_product(&lbar, set)?.scale(set.iter().map(|i| r[i - 1]).product());
                    acc += weight * comp.eval(&pt)?;
                }
                Ok(acc)
            })?;
            Ok(IntegralCheck { lhs, rhs })
        }
    }
}

/// `P(x, ξ) = (1 - |x|^2) / |x - ξ|^4` for `|ξ| = 1`, with `|x - ξ|^2 = |x|^2 - 2<x, ξ> + 1`.
pub fn poisson_kernel(x: Quaternion, xi: Quaternion) -> f64 {
    let nx = x.norm_sqr();
    let dot = x.w * xi.w + x.x * xi.x + x.y * xi.y + x.z * xi.z;
    let d2 = nx - 2.0 * dot + 1.0;
    (1.0 - nx) / (d2 * d2)
}

/// Poisson formulas with interior points `x_1, ..., x_m` of the unit ball.
#[allow(clippy::too_many_arguments)]
pub fn poisson_check(
    p: &QPolynomial,
    a: &QPoint,
    r: &[f64],
    x: &[Quaternion],
    m: usize,
    formula: PoissonFormula,
    nsamples: u64,
    seed: u64,
) -> Result<IntegralCheck> {
    validate(p, a, r, m)?;
    if x.len() != m {
        return Err(Error::domain(format!(
            "expected {m} interior points, got {}",
            x.len()
        )));
    }
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| v.norm().is_nan() || v.norm() >= 1.0)
    {
        return Err(Error::domain(format!(
            "interior point x_{} has |x| = {} >= 1",
            i + 1,
            v.norm()
        )));
    }
    let ac = a.coords();
    let xpad: Vec<Quaternion> = (0..ac.len())
        .map(|i| x.get(i).copied().unwrap_or_default())
        .collect();
    let target = shifted(ac, r, &xpad, m, ac);
    let lhs = p.eval(&target)?;
    let xbar = conj_all(x);
    let rhs = match formula {
        PoissonFormula::First => {
            let hm = IndexSet::interval(m);
            let left: Vec<Quaternion> =
                (0..m).map(|i| ac[i].conj() + xbar[i].scale(r[i])).collect();
            let parts = hm
                .subsets()
                .map(|k| {
                    let kc = hm.difference(k);
                    Ok((
                        ordered_product(&left, kc)?.scale(kc.sign()),
                        ClosedForm::component(p, hm, k)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            mc_estimate(m, nsamples, seed, |xi| {
                let pt = shifted(ac, r, xi, m, ac);
                let mut acc = Quaternion::ZERO;
                for (w, s) in &parts {
                    acc += *w * s.eval(&pt)?;
                }
                let kernel: f64 = (0..m).map(|t| poisson_kernel(x[t], xi[t])).product();
                Ok(acc.scale(kernel))
            })?
        }
        PoissonFormula::Second => {
            let comps = empty_components(p, m)?;
            mc_estimate(m, nsamples, seed, |xi| {
                let diff: Vec<Quaternion> = (0..m).map(|i| xi[i].conj() - xbar[i]).collect();
                let kernels: Vec<f64> = (0..m).map(|t| poisson_kernel(x[t], xi[t])).collect();
                let mut acc = Quaternion::ZERO;
                for (j, comp) in comps.iter().enumerate() {
                    let upto = (j + 1).min(m);
                    let pt = shifted(ac, r, xi, upto, &target);
                    let set = IndexSet::interval(j);
                    let weight =
                        ordered_product(&diff, set)?.scale(set.iter().map(|i| r[i - 1]).product());
                    let kernel: f64 = kernels[..upto].iter().product();
                    acc += (weight * comp.eval(&pt)?).scale(kernel);
                }
                Ok(acc)
            })?
        }
    };
    Ok(IntegralCheck { lhs, rhs })
}
