//! Well parameters and the alpha / alpha-tilde decay-exponent algebra shared
//! by every other module.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced parameters of the PT-symmetric well: depth v0 = 2mV0/hbar^2,
/// gain/loss magnitude v_I = 2mV_I/hbar^2, half-width b, and delta strength
/// Lambda = 2m lambda/hbar^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams {
    pub v0: f64,
    pub vi: f64,
    pub b: f64,
    pub lambda: f64,
}

impl WellParams {
    pub fn new(v0: f64, vi: f64, b: f64, lambda: f64) -> Result<Self> {
        if !(v0.is_finite() && vi.is_finite() && b.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidParameter("non-finite well parameter".into()));
        }
        if b <= 0.0 {
            return Err(Error::InvalidParameter(format!("half-width b = {b} must be > 0")));
        }
        if vi < 0.0 {
            return Err(Error::InvalidParameter(format!("v_I = {vi} must be >= 0")));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("Lambda = {lambda} must be >= 0")));
        }
        Ok(Self { v0, vi, b, lambda })
    }

    /// Same well with a different delta strength (used by continuation in Lambda).
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    /// Same well with a different gain/loss magnitude (used by sweeps in v_I).
    pub fn with_vi(&self, vi: f64) -> Self {
        Self { vi, ..*self }
    }
}

/// Dimensionful potential parameters before reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Real well depth V0 (energy units).
    pub v0: f64,
    /// Imaginary potential magnitude V_I (energy units).
    pub vi: f64,
    /// Delta strength lambda (energy * length units).
    pub lambda: f64,
    pub mass: f64,
    pub hbar: f64,
}

/// Map dimensionful parameters to the reduced set (v0, v_I, b, Lambda)
/// by multiplying energies with 2m/hbar^2.
pub fn reduce(p: &PhysicalParams, b: f64) -> Result<WellParams> {
    if !(p.mass > 0.0) || !p.mass.is_finite() {
        return Err(Error::InvalidParameter(format!("mass = {} must be > 0", p.mass)));
    }
    if !(p.hbar > 0.0) || !p.hbar.is_finite() {
        return Err(Error::InvalidParameter(format!("hbar = {} must be > 0", p.hbar)));
    }
    let scale = 2.0 * p.mass / (p.hbar * p.hbar);
    WellParams::new(scale * p.v0, scale * p.vi, b, scale * p.lambda)
}

/// The decay exponents alpha = sqrt(v0 + i v_I - k^2) and
/// alpha~ = sqrt(v0 - i v_I - k^2), branch fixed so Re >= 0, together with
/// the real decomposition alpha = alpha_r + i alpha_i valid for real k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPair {
    pub alpha: Complex64,
    pub alpha_tilde: Complex64,
    /// Re(alpha) for real k, from the explicit radical form.
    pub alpha_r: f64,
    /// |Im(alpha)| for real k, from the explicit radical form.
    pub alpha_i: f64,
}

impl AlphaPair {
    /// |alpha|^2 = alpha_r^2 + alpha_i^2.
    pub fn abs_sq(&self) -> f64 {
        self.alpha_r * self.alpha_r + self.alpha_i * self.alpha_i
    }
}

fn principal_positive_re(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

/// Evaluate alpha and alpha~ at (possibly complex) k.
///
/// For real k the alpha_r / alpha_i fields are computed independently from the
/// nested radicals
///   alpha_r = sqrt((sqrt((v0-k^2)^2 + v_I^2) + (v0-k^2))/2),
///   alpha_i = sqrt((sqrt((v0-k^2)^2 + v_I^2) - (v0-k^2))/2),
/// which the tests cross-check against the complex square root. For complex k
/// (branch continuation past an exceptional point) they fall back to the real
/// and |imaginary| parts of alpha itself.
pub fn alpha_pair(p: &WellParams, k: Complex64) -> AlphaPair {
    let k2 = k * k;
    let alpha = principal_positive_re(Complex64::new(p.v0, p.vi) - k2);
    let alpha_tilde = principal_positive_re(Complex64::new(p.v0, -p.vi) - k2);
    let (alpha_r, alpha_i) = if k.im == 0.0 {
        // the nested radicals, with the small branch rewritten as
        // v_I^2 / (2 (m -+ d)) so nothing cancels when v_I << |d|
        let d = p.v0 - k.re * k.re;
        let m = (d * d + p.vi * p.vi).sqrt();
        if d >= 0.0 {
            let ar = ((m + d) / 2.0).sqrt();
            let ai = if p.vi == 0.0 { 0.0 } else { p.vi / (2.0 * (m + d)).sqrt() };
            (ar, ai)
        } else {
            let ai = ((m - d) / 2.0).sqrt();
            let ar = if p.vi == 0.0 { 0.0 } else { p.vi / (2.0 * (m - d)).sqrt() };
            (ar, ai)
        }
    } else {
        (alpha.re, alpha.im.abs())
    };
    AlphaPair { alpha, alpha_tilde, alpha_r, alpha_i }
}

/// Convenience wrapper for real k.
pub fn alpha_pair_real(p: &WellParams, k: f64) -> AlphaPair {
    alpha_pair(p, Complex64::new(k, 0.0))
}

/// The piecewise complex potential of the well (delta term excluded):
/// v0 + i v_I for x <= -b, v0 - i v_I for x >= b, 0 inside.
pub fn complex_potential(p: &WellParams, x: f64) -> Complex64 {
    if x <= -p.b {
        Complex64::new(p.v0, p.vi)
    } else if x >= p.b {
        Complex64::new(p.v0, -p.vi)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_maps_paper_examples() {
        let p = PhysicalParams { v0: 0.0, vi: 0.0, lambda: 0.0, mass: 1.0, hbar: 1.0 };
        let w = reduce(&p, 1.0).unwrap();
        assert_eq!((w.v0, w.vi, w.b, w.lambda), (0.0, 0.0, 1.0, 0.0));

        let p = PhysicalParams { v0: 4.5, vi: 7.5, lambda: 0.25, mass: 1.0, hbar: 1.0 };
        let w = reduce(&p, 1.0).unwrap();
        assert_eq!((w.v0, w.vi, w.b, w.lambda), (9.0, 15.0, 1.0, 0.5));

        let p = PhysicalParams { v0: 9.0, vi: 15.0, lambda: 1.0, mass: 0.5, hbar: 1.0 };
        let w = reduce(&p, 1.0).unwrap();
        assert_eq!((w.v0, w.vi, w.b, w.lambda), (9.0, 15.0, 1.0, 1.0));
    }

    #[test]
    fn reduce_rejects_bad_mass_and_hbar() {
        let p = PhysicalParams { v0: 1.0, vi: 0.0, lambda: 0.0, mass: 0.0, hbar: 1.0 };
        assert!(reduce(&p, 1.0).is_err());
        let p = PhysicalParams { v0: 1.0, vi: 0.0, lambda: 0.0, mass: 1.0, hbar: -1.0 };
        assert!(reduce(&p, 1.0).is_err());
    }

    #[test]
    fn params_reject_negative_lambda_and_vi() {
        assert!(WellParams::new(9.0, 15.0, 1.0, -0.1).is_err());
        assert!(WellParams::new(9.0, -1.0, 1.0, 0.0).is_err());
        assert!(WellParams::new(9.0, 1.0, 0.0, 0.0).is_err());
        assert!(WellParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn alpha_vanishes_at_band_edge() {
        // v0 - k^2 = 0 with v_I = 0 gives alpha = 0
        let p = WellParams::new(9.0, 0.0, 1.0, 0.0).unwrap();
        let a = alpha_pair_real(&p, 3.0);
        assert_eq!(a.alpha, Complex64::new(0.0, 0.0));
        assert_eq!(a.alpha_r, 0.0);
        assert_eq!(a.alpha_i, 0.0);
    }

    #[test]
    fn alpha_pure_imaginary_for_free_particle() {
        // alpha = sqrt(-4) = 2i on the Re >= 0 branch
        let p = WellParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let a = alpha_pair_real(&p, 2.0);
        assert!(a.alpha_r.abs() < 1e-15);
        assert!((a.alpha_i - 2.0).abs() < 1e-15);
        assert!((a.alpha - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn radical_form_matches_complex_root() {
        let p = WellParams::new(9.0, 15.0, 1.0, 0.0).unwrap();
        let a = alpha_pair_real(&p, 2.0);
        assert!((a.alpha.re - a.alpha_r).abs() < 1e-12);
        assert!((a.alpha.im.abs() - a.alpha_i).abs() < 1e-12);
        // alpha^2 reproduces the radicand
        let rad = Complex64::new(p.v0 - 4.0, p.vi);
        assert!((a.alpha * a.alpha - rad).norm() <= 1e-14 * rad.norm());
        // Eq. (8)-(9) identities
        assert!((a.alpha_r * a.alpha_r - a.alpha_i * a.alpha_i - (p.v0 - 4.0)).abs() < 1e-12);
        assert!((2.0 * a.alpha_r * a.alpha_i - p.vi).abs() < 1e-11);
    }

    #[test]
    fn alpha_tilde_is_conjugate_for_real_k() {
        let p = WellParams::new(9.0, 15.0, 1.0, 0.5).unwrap();
        for &k in &[0.3, 1.7, 2.999, 3.001, 8.5] {
            let a = alpha_pair_real(&p, k);
            assert!((a.alpha_tilde - a.alpha.conj()).norm() <= 1e-15 * (1.0 + a.alpha.norm()));
        }
    }
}
