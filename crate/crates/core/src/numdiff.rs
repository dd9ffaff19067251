//! Central finite differences with one level of Richardson extrapolation.
//!
//! The base rules are the fourth-order five-point stencils; combining steps `h`
//! and `h/2` as `(16 D(h/2) - D(h)) / 15` cancels the `h^4` error term.

use crate::error::{Error, Result};

/// Steps below this lose too many digits to cancellation.
pub const MIN_STEP: f64 = 1e-8;

/// Default step for a coordinate of magnitude `|t|`.
pub fn default_step(t: f64) -> f64 {
    1e-3 * (1.0 + t.abs())
}

fn check_step(step: f64) -> Result<()> {
    if !step.is_finite() || step < MIN_STEP {
        return Err(Error::domain(format!(
            "finite-difference step {step:e} is below the cancellation guard {MIN_STEP:e}"
        )));
    }
    Ok(())
}

fn combine(terms: &[(f64, &[f64])], scale: f64) -> Vec<f64> {
    let len = terms[0].1.len();
    (0..len)
        .map(|i| terms.iter().map(|(w, v)| w * v[i]).sum::<f64>() * scale)
        .collect()
}

/// First derivative of a vector-valued function at `x`.
pub fn first<F>(f: F, x: f64, step: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    check_step(step)?;
    let stencil = |h: f64| -> Result<Vec<f64>> {
        let (p2, p1, m1, m2) = (f(x + 2.0 * h)?, f(x + h)?, f(x - h)?, f(x - 2.0 * h)?);
        Ok(combine(
            &[(-1.0, &p2), (8.0, &p1), (-8.0, &m1), (1.0, &m2)],
            1.0 / (12.0 * h),
        ))
    };
    let coarse = stencil(step)?;
    let fine = stencil(step / 2.0)?;
    Ok(combine(&[(16.0, &fine), (-1.0, &coarse)], 1.0 / 15.0))
}

/// Second derivative of a vector-valued function at `x`.
pub fn second<F>(f: F, x: f64, step: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    check_step(step)?;
    let center = f(x)?;
    let stencil = |h: f64| -> Result<Vec<f64>> {
        let (p2, p1, m1, m2) = (f(x + 2.0 * h)?, f(x + h)?, f(x - h)?, f(x - 2.0 * h)?);
        Ok(combine(
            &[
                (-1.0, &p2),
                (16.0, &p1),
                (-30.0, &center),
                (16.0, &m1),
                (-1.0, &m2),
            ],
            1.0 / (12.0 * h * h),
        ))
    };
    let coarse = stencil(step)?;
    let fine = stencil(step / 2.0)?;
    Ok(combine(&[(16.0, &fine), (-1.0, &coarse)], 1.0 / 15.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_derivative_of_sin() {
        let d = first(|t| Ok(vec![t.sin(), t.exp()]), 0.7, 1e-2).unwrap();
        assert!((d[0] - 0.7f64.cos()).abs() < 1e-12);
        assert!((d[1] - 0.7f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn second_derivative_of_polynomial_is_exact_up_to_rounding() {
        let d = second(|t| Ok(vec![t.powi(5)]), 1.3, 1e-2).unwrap();
        assert!((d[0] - 20.0 * 1.3f64.powi(3)).abs() < 1e-8);
    }

    #[test]
    fn rejects_tiny_steps() {
        assert!(first(|t| Ok(vec![t]), 0.0, 1e-9).is_err());
        assert!(second(|t| Ok(vec![t]), 0.0, f64::NAN).is_err());
    }
}
