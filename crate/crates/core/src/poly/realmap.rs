//! Quaternion-valued polynomials in the `4n` real coordinates.
//!
//! Variable `x_h = alpha_h + i beta_h + j gamma_h + k delta_h` contributes the
//! four real coordinates with indices `4(h-1) .. 4(h-1)+3`. Coefficients are
//! quaternions and multiply in order, so the product is noncommutative in the
//! coefficients but commutative in the (real) monomials.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::quat::Quaternion;

/// Maximum total degree accepted by the expansion routines.
pub const MAX_DEGREE: u32 = 32;

/// Exact quaternion-valued polynomial in the real coordinates of `n` quaternionic variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolyMap {
    n: usize,
    coeffs: BTreeMap<Vec<u8>, Quaternion>,
}

/// Index of real coordinate `c` (0 = alpha, 1 = beta, 2 = gamma, 3 = delta) of variable `h`.
pub fn coord_index(h: usize, c: usize) -> usize {
    4 * (h - 1) + c
}

impl RealPolyMap {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Quaternion) -> Self {
        let mut m = Self::zero(n);
        m.insert(vec![0; 4 * n], c);
        m
    }

    /// The real coordinate `c` of variable `h`, as a real-valued map.
    pub fn coordinate(n: usize, h: usize, c: usize) -> Self {
        let mut e = vec![0; 4 * n];
        e[coord_index(h, c)] = 1;
        let mut m = Self::zero(n);
        m.insert(e, Quaternion::ONE);
        m
    }

    /// `x_h` itself.
    pub fn variable(n: usize, h: usize) -> Self {
        let units = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
        let mut m = Self::zero(n);
        for (c, u) in units.into_iter().enumerate() {
            let mut e = vec![0; 4 * n];
            e[coord_index(h, c)] = 1;
            m.insert(e, u);
        }
        m
    }

    /// `conj(x_h)`.
    pub fn conj_variable(n: usize, h: usize) -> Self {
        let mut m = Self::variable(n, h);
        for (e, c) in m.coeffs.iter_mut() {
            if e[coord_index(h, 0)] == 0 {
                *c = -*c;
            }
        }
        m
    }

    /// `|Im x_h|^2 = beta_h^2 + gamma_h^2 + delta_h^2`.
    pub fn im_norm_sqr(n: usize, h: usize) -> Self {
        let mut m = Self::zero(n);
        for c in 1..4 {
            let mut e = vec![0; 4 * n];
            e[coord_index(h, c)] = 2;
            m.insert(e, Quaternion::ONE);
        }
        m
    }

    fn insert(&mut self, e: Vec<u8>, c: Quaternion) {
        if c == Quaternion::ZERO {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert(Quaternion::ZERO);
        *slot += c;
    }

    fn prune(mut self) -> Self {
        self.coeffs.retain(|_, c| *c != Quaternion::ZERO);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Quaternion)> {
        self.coeffs.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the monomial with exponent vector `e`.
    pub fn coeff(&self, e: &[u8]) -> Quaternion {
        self.coeffs.get(e).copied().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute coordinate over all coefficients; `0` for the zero map.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.max_abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.max_abs_coeff() <= tol
    }

    pub fn scale(&self, s: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), c.scale(s)))
            .collect();
        Self { n: self.n, coeffs }.prune()
    }

    /// `q * self`.
    pub fn left_mul(&self, q: Quaternion) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), q * *c))
            .collect();
        Self { n: self.n, coeffs }.prune()
    }

    /// `self * q`.
    pub fn right_mul(&self, q: Quaternion) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), *c * q))
            .collect();
        Self { n: self.n, coeffs }.prune()
    }

    /// Pointwise product `self * other`, coefficients multiplied in that order.
    pub fn mul(&self, other: &RealPolyMap) -> Self {
        assert_eq!(self.n, other.n, "variable counts differ");
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, *ca * *cb);
            }
        }
        out.prune()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n, Quaternion::ONE);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to real coordinate index `v`.
    pub fn partial(&self, v: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.coeffs {
            if e[v] == 0 {
                continue;
            }
            let mut d = e.clone();
            let k = d[v];
            d[v] -= 1;
            out.insert(d, c.scale(k as f64));
        }
        out.prune()
    }

    /// Evaluates at a point given by its `n` quaternionic coordinates.
    pub fn eval(&self, x: &[Quaternion]) -> Quaternion {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        let coords: Vec<f64> = x.iter().flat_map(|q| q.to_array()).collect();
        let maxdeg = self
            .coeffs
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers: Vec<Vec<f64>> = coords
            .iter()
            .map(|&t| {
                let mut p = Vec::with_capacity(maxdeg + 1);
                let mut acc = 1.0;
                for _ in 0..=maxdeg {
                    p.push(acc);
                    acc *= t;
                }
                p
            })
            .collect();
        self.coeffs
            .iter()
            .map(|(e, c)| {
                let m: f64 = e
                    .iter()
                    .enumerate()
                    .map(|(v, &d)| powers[v][d as usize])
                    .product();
                c.scale(m)
            })
            .sum()
    }
}

impl Add for &RealPolyMap {
    type Output = RealPolyMap;
    fn add(self, o: &RealPolyMap) -> RealPolyMap {
        assert_eq!(self.n, o.n, "variable counts differ");
        let mut out = self.clone();
        for (e, c) in &o.coeffs {
            out.insert(e.clone(), *c);
        }
        out.prune()
    }
}

impl Sub for &RealPolyMap {
    type Output = RealPolyMap;
    fn sub(self, o: &RealPolyMap) -> RealPolyMap {
        self + &(-o)
    }
}

impl Neg for &RealPolyMap {
    type Output = RealPolyMap;
    fn neg(self) -> RealPolyMap {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_variable_by_hand() {
        let x = RealPolyMap::variable(1, 1);
        let sq = x.mul(&x);
        let e = |a: u8, b: u8, g: u8, d: u8| vec![a, b, g, d];
        assert_eq!(sq.coeff(&e(2, 0, 0, 0)), Quaternion::ONE);
        assert_eq!(sq.coeff(&e(0, 2, 0, 0)), Quaternion::real(-1.0));
        assert_eq!(sq.coeff(&e(0, 0, 2, 0)), Quaternion::real(-1.0));
        assert_eq!(sq.coeff(&e(0, 0, 0, 2)), Quaternion::real(-1.0));
        assert_eq!(sq.coeff(&e(1, 1, 0, 0)), Quaternion::I.scale(2.0));
        assert_eq!(sq.coeff(&e(1, 0, 1, 0)), Quaternion::J.scale(2.0));
        assert_eq!(sq.coeff(&e(1, 0, 0, 1)), Quaternion::K.scale(2.0));
        // cross terms beta*gamma cancel: ij + ji = 0
        assert_eq!(sq.coeff(&e(0, 1, 1, 0)), Quaternion::ZERO);
        assert_eq!(sq.len(), 7);
    }

    #[test]
    fn conj_variable_times_variable_is_norm() {
        let x = RealPolyMap::variable(2, 2);
        let xb = RealPolyMap::conj_variable(2, 2);
        let prod = xb.mul(&x);
        let norm = &RealPolyMap::coordinate(2, 2, 0).pow(2) + &RealPolyMap::im_norm_sqr(2, 2);
        assert_eq!(prod, norm);
    }

    #[test]
    fn eval_and_partial() {
        let x = RealPolyMap::variable(1, 1);
        let cube = x.pow(3);
        let p = Quaternion::new(0.3, -0.7, 0.2, 1.1);
        assert!((cube.eval(&[p]) - p * p * p).norm() < 1e-14);
        // d/d alpha of x^3 at the identity-direction is 3 x^2 (alpha commutes with x)
        let d = cube.partial(0);
        assert!((d.eval(&[p]) - (p * p).scale(3.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_handling() {
        let x = RealPolyMap::variable(1, 1);
        assert!((&x - &x).is_empty());
        assert_eq!((&x - &x).max_abs_coeff(), 0.0);
        assert_eq!(
            RealPolyMap::constant(1, Quaternion::real(2.0))
                .partial(0)
                .len(),
            0
        );
    }
}
