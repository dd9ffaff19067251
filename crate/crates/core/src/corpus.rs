//! Seeded random test material: polynomials, points and unit imaginaries.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::poly::{QPolynomial, Term};
use crate::quat::Quaternion;
use crate::slice::QPoint;

pub const MAX_CORPUS_DEGREE: u32 = 4;
pub const MAX_CORPUS_VARS: usize = 3;

/// A generator for stream `stream` of `seed`; streams are independent.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform in `[-s, s]^4`.
pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R, s: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-s..=s),
        rng.random_range(-s..=s),
        rng.random_range(-s..=s),
        rng.random_range(-s..=s),
    )
}

/// Uniform on the unit sphere of purely imaginary quaternions.
pub fn random_unit_imaginary<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let v = Quaternion::new(
            0.0,
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// `alpha_h + J_h beta_h` with `alpha_h ∈ [-1.5, 1.5]`, `beta_h ∈ [beta_min, beta_max]` and random `J_h`.
pub fn random_point<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    beta_min: f64,
    beta_max: f64,
) -> QPoint {
    let coords = (0..n)
        .map(|_| {
            let a = rng.random_range(-1.5..=1.5);
            let b = rng.random_range(beta_min..=beta_max);
            Quaternion::real(a) + random_unit_imaginary(rng).scale(b)
        })
        .collect();
    QPoint::new(coords).expect("n is in range")
}

/// Random exponent vector of total degree at most `max_degree`.
fn random_exponent<R: Rng + ?Sized>(rng: &mut R, n: usize, max_degree: u32) -> Vec<u32> {
    let d = rng.random_range(0..=max_degree);
    let mut alpha = vec![0u32; n];
    for _ in 0..d {
        alpha[rng.random_range(0..n)] += 1;
    }
    alpha
}

/// 1 to 4 terms of total degree at most `max_degree`; coefficients uniform in `[-1, 1]^4`,
/// or real when `real_coefficients`.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_degree: u32,
    real_coefficients: bool,
) -> QPolynomial {
    loop {
        let count = rng.random_range(1..=4);
        let mut terms: Vec<Term> = Vec::with_capacity(count);
        for _ in 0..count {
            let alpha = random_exponent(rng, n, max_degree);
            let mut coeff = random_quaternion(rng, 1.0);
            if real_coefficients {
                coeff = Quaternion::real(coeff.w);
            }
            // repeated monomials would merge and push the coefficient out of range
            if terms.iter().all(|t| t.alpha != alpha) {
                terms.push(Term { alpha, coeff });
            }
        }
        let p = QPolynomial::new(n, terms).expect("generated terms are valid");
        if !p.is_zero() {
            return p;
        }
    }
}

/// `count` polynomials cycling through `n = 1, 2, 3`, degree at most 4.
pub fn polynomial_corpus(seed: u64, count: usize) -> Vec<QPolynomial> {
    let mut rng = rng_for(seed, 0);
    (0..count)
        .map(|i| random_polynomial(&mut rng, 1 + i % MAX_CORPUS_VARS, MAX_CORPUS_DEGREE, false))
        .collect()
}

/// Like [`polynomial_corpus`] with real coefficients only.
pub fn real_polynomial_corpus(seed: u64, count: usize) -> Vec<QPolynomial> {
    let mut rng = rng_for(seed, 1);
    (0..count)
        .map(|i| random_polynomial(&mut rng, 1 + i % MAX_CORPUS_VARS, MAX_CORPUS_DEGREE, true))
        .collect()
}

/// `P` with the exponents of `x_1, ..., x_{m-1}` set to zero, so it depends on `x_m, ..., x_n` only.
pub fn restrict_to_vars_from(p: &QPolynomial, m: usize) -> QPolynomial {
    let terms = p
        .terms()
        .iter()
        .map(|t| Term {
            alpha: t
                .alpha
                .iter()
                .enumerate()
                .map(|(i, &e)| if i + 1 < m { 0 } else { e })
                .collect(),
            coeff: t.coeff,
        })
        .collect();
    QPolynomial::new(p.n(), terms).expect("restriction keeps the shape")
}
