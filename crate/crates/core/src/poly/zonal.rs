//! Zonal factors `Zt_k(q) = sum_{j=0}^{k} q^j conj(q)^{k-j}`.
//!
//! `Zt_k` is real valued and depends on `q` only through `alpha = Re q` and
//! `beta^2 = |Im q|^2`. It satisfies `s_k = 2 alpha s_{k-1} - |q|^2 s_{k-2}`
//! with `s_0 = 1`, `s_{-1} = 0`, and `Zt_k = (x^{k+1})'_s`.

use crate::quat::Quaternion;

/// `Zt_k` from `alpha` and `beta^2`; `k = -1` gives `0`.
pub fn zonal_tilde_ab(k: i32, alpha: f64, beta_sq: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let norm_sq = alpha * alpha + beta_sq;
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        let next = 2.0 * alpha * cur - norm_sq * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Zt_k(q)`; `k = -1` gives `0`.
pub fn zonal_tilde(k: i32, q: Quaternion) -> f64 {
    let im = q.im();
    zonal_tilde_ab(k, q.w, im.norm_sqr())
}

/// Table `[Zt_0, ..., Zt_kmax]` at one point.
pub(crate) fn zonal_table(kmax: usize, alpha: f64, beta_sq: f64) -> Vec<f64> {
    let norm_sq = alpha * alpha + beta_sq;
    let mut out = Vec::with_capacity(kmax + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for _ in 0..kmax {
        let next = 2.0 * alpha * cur - norm_sq * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::split;

    /// Direct sum `sum_j q^j conj(q)^{k-j}`.
    fn zonal_by_sum(k: u32, q: Quaternion) -> Quaternion {
        (0..=k).map(|j| q.powi(j) * q.conj().powi(k - j)).sum()
    }

    #[test]
    fn low_order_values() {
        let q = Quaternion::new(0.7, -0.3, 1.1, 0.4);
        let (a, b2) = (q.w, q.im().norm_sqr());
        assert_eq!(zonal_tilde(-1, q), 0.0);
        assert_eq!(zonal_tilde(0, q), 1.0);
        assert!((zonal_tilde(1, q) - 2.0 * a).abs() < 1e-15);
        assert!((zonal_tilde(2, q) - (3.0 * a * a - b2)).abs() < 1e-14);
        assert!((zonal_tilde(3, q) - 4.0 * a * (a * a - b2)).abs() < 1e-14);
    }

    #[test]
    fn recurrence_matches_defining_sum() {
        let q = Quaternion::new(-0.4, 0.9, 0.2, -0.6);
        for k in 0..=8 {
            let direct = zonal_by_sum(k, q);
            let z = zonal_tilde(k as i32, q);
            assert!(direct.im().norm() < 1e-12, "sum must be real");
            assert!((direct.w - z).abs() < 1e-12 * (1.0 + z.abs()), "k={k}");
        }
    }

    #[test]
    fn independent_of_imaginary_unit() {
        let q = Quaternion::new(0.5, 0.8, 0.0, 0.0);
        let s = split(q);
        let other = crate::quat::join(s.alpha, s.beta, Quaternion::new(0.0, 0.0, 0.6, 0.8));
        for k in 0..=8 {
            assert!((zonal_tilde(k, q) - zonal_tilde(k, other)).abs() <= 1e-13);
        }
    }

    #[test]
    fn table_agrees_with_scalar() {
        let t = zonal_table(6, 0.3, 0.7);
        for (k, v) in t.iter().enumerate() {
            assert_eq!(*v, zonal_tilde_ab(k as i32, 0.3, 0.7));
        }
    }
}
