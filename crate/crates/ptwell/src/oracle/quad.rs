//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: usize = 60;

/// Integrate f over [a, b] to absolute tolerance `tol` by adaptive Simpson
/// subdivision with Richardson correction.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("quadrature bounds must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::MaxDepthExceeded { a, b });
    }
    let half_tol = 0.5 * tol;
    Ok(simpson_step(f, a, m, fa, flm, fm, left, half_tol, depth + 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, half_tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_sine() {
        let v = adaptive_quadrature(|x| x * x, 0.0, 1.0, 1e-13).unwrap();
        assert!((v - 1.0 / 3.0).abs() <= 1e-12);
        let v = adaptive_quadrature(f64::sin, 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = adaptive_quadrature(|x| (20.0 * x).cos(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 20.0f64.sin() / 20.0).abs() <= 1e-11);
    }

    #[test]
    fn depth_limit_reported() {
        // a needle far too sharp for the depth budget at an absurd tolerance
        let r = adaptive_quadrature(|x| 1.0 / (1e-300 + x.abs()), -1.0, 1.0, 1e-300);
        assert!(matches!(r, Err(Error::MaxDepthExceeded { .. })));
    }
}
