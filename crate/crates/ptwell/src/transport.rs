//! Probability flux, gain/loss source terms, the two energy densities, the
//! energy fluxes, and the flux-conservation / unitarity bridge.

use num_complex::Complex64;

use crate::boundstates::{
    bound_density, bound_wavefunction_derivs, BoundState, Side, WavefunctionSample,
};
use crate::error::Result;
use crate::scattering::{scattering_coefficients, scattering_derivs, Incidence};
use crate::units::{HBAR2_OVER_2M, HBAR_OVER_M};
use crate::well::{alpha_pair_real, complex_potential, WellParams};

/// The probability current J = (hbar/m) Im(psi* psi') built from a point
/// sample; in reduced units the prefactor is the literal 2.
pub fn probability_flux(sample: &WavefunctionSample) -> f64 {
    HBAR_OVER_M * (sample.psi.conj() * sample.dpsi).im
}

/// Closed-form bound-state flux: constant inside the well, exponentially
/// enveloped outside.
pub fn bound_flux(s: &BoundState, x: f64) -> f64 {
    let p = &s.params;
    let (k, b, l) = (s.k, p.b, p.lambda);
    let (ar, ai) = (s.alpha.alpha_r, s.alpha.alpha_i);
    let (c, sb) = ((k * b).cos(), (k * b).sin());
    let core = s.c1_sq * HBAR_OVER_M * ai * k * (k * c + ar * sb) * (c + l / (2.0 * k) * sb);
    if x <= -b {
        core * (2.0 * ar * (x + b)).exp()
    } else if x >= b {
        core * (-2.0 * ar * (x - b)).exp()
    } else {
        core
    }
}

/// Gain/loss source term Q_d = (2 V_I(x)/hbar) rho_D: positive (source) on
/// the left lead, negative (drain) on the right, zero inside.
pub fn source_term(s: &BoundState, x: f64) -> f64 {
    let p = &s.params;
    let vi_signed = if x <= -p.b {
        p.vi
    } else if x >= p.b {
        -p.vi
    } else {
        0.0
    };
    HBAR_OVER_M * vi_signed * bound_density(s, x)
}

/// First energy density rho1_E = Re(psi* H psi) = k^2 rho_D for a stationary
/// PT-symmetric state (E real by construction of `BoundState`).
pub fn energy_density_1(s: &BoundState, x: f64) -> f64 {
    HBAR2_OVER_2M * s.energy * bound_density(s, x)
}

/// Second energy density: the smooth part |psi'|^2 + V_R(x)|psi|^2 and,
/// separately, the coefficient of the delta term Lambda |psi(0)|^2.
/// The delta contribution is never smeared onto a grid; integrals add it
/// analytically.
pub fn energy_density_2(s: &BoundState, x: f64) -> (f64, f64) {
    let d = bound_wavefunction_derivs(s, x, None);
    let v_r = complex_potential(&s.params, x).re;
    let smooth = HBAR2_OVER_2M * d[1].norm_sqr() + v_r * d[0].norm_sqr();
    (smooth, delta_point_mass(s))
}

/// Coefficient of the delta(x) term in rho2_E.
pub fn delta_point_mass(s: &BoundState) -> f64 {
    s.params.lambda * bound_density(s, 0.0)
}

/// The closed-form smooth part of rho2_E (interior trigonometric form,
/// exterior (2 alpha_R^2 + k^2) rho_D), for cross-checking the definition.
pub fn energy_density_2_closed(s: &BoundState, x: f64) -> f64 {
    let p = &s.params;
    let (k, b, l) = (s.k, p.b, p.lambda);
    let (ar, ai) = (s.alpha.alpha_r, s.alpha.alpha_i);
    if x.abs() >= b {
        return (2.0 * ar * ar + k * k) * bound_density(s, x);
    }
    let (c, sb) = ((k * b).cos(), (k * b).sin());
    let cl = c + l / (2.0 * k) * sb;
    let kc = k * c + ar * sb;
    let sg = if x == 0.0 { 0.0 } else { x.signum() };
    let (cx, sx) = ((k * x).cos(), (k * x).sin());
    let dev = -sx + l / (2.0 * k) * sg * cx;
    s.c1_sq * k * k * (dev * dev * kc * kc + ai * ai * cl * cl * cx * cx)
}

/// Energy flux of a stationary state: J1_E = J2_E = (hbar^2 k^2/2m) J_d.
pub fn energy_flux(s: &BoundState, x: f64) -> f64 {
    HBAR2_OVER_2M * s.energy * bound_flux(s, x)
}

/// The two defining energy-flux expressions evaluated directly from psi and
/// its derivatives, with H psi assembled as -psi'' + V(x) psi. Returns
/// (J1_E, J2_E); both must reduce to k^2 J_d for stationary states.
pub fn energy_flux_defining(s: &BoundState, x: f64, side: Option<Side>) -> (f64, f64) {
    let d = bound_wavefunction_derivs(s, x, side);
    let v = complex_potential(&s.params, x);
    let h_psi = -HBAR2_OVER_2M * d[2] + v * d[0];
    let h_psi_prime = -HBAR2_OVER_2M * d[3] + v * d[1];
    let j1 = 0.5
        * HBAR_OVER_M
        * ((d[0].conj() * h_psi_prime).im - (d[1].conj() * h_psi).im);
    let j2 = HBAR_OVER_M * (d[1] * h_psi.conj()).im;
    (j1, j2)
}

/// Energy source term Q_E = (hbar^2 k^2/2m) Q_d.
pub fn energy_source(s: &BoundState, x: f64) -> f64 {
    HBAR2_OVER_2M * s.energy * source_term(s, x)
}

/// Closed-form lead fluxes of the scattering states with unit incident
/// amplitude; interior points are evaluated from the scattering wavefunction
/// itself. Fluxes are signed: the right-to-left process carries negative
/// (leftward) current.
pub fn scattering_fluxes(p: &WellParams, k: f64, incidence: Incidence, x: f64) -> Result<f64> {
    let a = alpha_pair_real(p, k);
    let (ar, ai) = (a.alpha_r, a.alpha_i);
    let d = scattering_coefficients(p, k)?;
    match incidence {
        Incidence::LeftToRight => {
            if x <= -p.b {
                let r = d.r_plus;
                let osc = (Complex64::new(0.0, 2.0 * ai * x)).exp();
                Ok(HBAR_OVER_M
                    * (ai * ((2.0 * ar * x).exp() - r.norm_sqr() * (-2.0 * ar * x).exp())
                        + 2.0 * ar * (r.conj() * osc).im))
            } else if x >= p.b {
                Ok(HBAR_OVER_M * d.t_minus.norm_sqr() * ai * (-2.0 * ar * x).exp())
            } else {
                let w = scattering_derivs(p, k, incidence, x)?;
                Ok(HBAR_OVER_M * (w[0].conj() * w[1]).im)
            }
        }
        Incidence::RightToLeft => {
            if x >= p.b {
                let r = d.r_minus;
                let osc = (Complex64::new(0.0, 2.0 * ai * x)).exp();
                Ok(HBAR_OVER_M
                    * (ai * (r.norm_sqr() * (-2.0 * ar * x).exp() - (2.0 * ar * x).exp())
                        - 2.0 * ar * (r * osc).im))
            } else if x <= -p.b {
                // leftward-moving transmitted wave: negative current
                Ok(-HBAR_OVER_M * d.t_plus.norm_sqr() * ai * (-2.0 * ar * x).exp())
            } else {
                let w = scattering_derivs(p, k, incidence, x)?;
                Ok(HBAR_OVER_M * (w[0].conj() * w[1]).im)
            }
        }
    }
}

/// Reproduce the generalized unitarity relation by transport: the source-side
/// flux at -b equals (hbar alpha_I/m) e^{-2 alpha_R b} [1 - (signed) |r+ r-|],
/// so dividing it out yields the pseudo-transmission. Returns the residual
/// |T_flux - T| against the algebraic T = |t|^2.
pub fn unitarity_from_flux(p: &WellParams, k: f64) -> Result<f64> {
    let a = alpha_pair_real(p, k);
    let d = scattering_coefficients(p, k)?;
    let j_in = scattering_fluxes(p, k, Incidence::LeftToRight, -p.b)?;
    let t_flux = j_in / (HBAR_OVER_M * a.alpha_i * (-2.0 * a.alpha_r * p.b).exp());
    Ok((t_flux - d.transmission).abs())
}

/// Sampled transport quantities of one bound state over a spatial grid.
#[derive(Debug, Clone)]
pub struct TransportProfile {
    pub grid: Vec<f64>,
    pub rho_d: Vec<f64>,
    pub j_d: Vec<f64>,
    pub q_d: Vec<f64>,
    pub rho_e1: Vec<f64>,
    /// Smooth part of rho2_E; the delta term is carried separately.
    pub rho_e2: Vec<f64>,
    pub j_e: Vec<f64>,
    pub q_e: Vec<f64>,
    /// Coefficient of the delta(x) point mass in rho2_E.
    pub delta_point_mass: f64,
    pub c1_sq: f64,
}

impl TransportProfile {
    pub fn compute(s: &BoundState, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(x_max > x_min) {
            return Err(crate::error::Error::InvalidParameter(
                "transport grid needs n >= 2 and x_max > x_min".into(),
            ));
        }
        let grid: Vec<f64> = (0..n)
            .map(|i| x_min + (x_max - x_min) * i as f64 / (n - 1) as f64)
            .collect();
        let mut pr = TransportProfile {
            grid: grid.clone(),
            rho_d: Vec::with_capacity(n),
            j_d: Vec::with_capacity(n),
            q_d: Vec::with_capacity(n),
            rho_e1: Vec::with_capacity(n),
            rho_e2: Vec::with_capacity(n),
            j_e: Vec::with_capacity(n),
            q_e: Vec::with_capacity(n),
            delta_point_mass: delta_point_mass(s),
            c1_sq: s.c1_sq,
        };
        for &x in &grid {
            pr.rho_d.push(bound_density(s, x));
            pr.j_d.push(bound_flux(s, x));
            pr.q_d.push(source_term(s, x));
            pr.rho_e1.push(energy_density_1(s, x));
            pr.rho_e2.push(energy_density_2(s, x).0);
            pr.j_e.push(energy_flux(s, x));
            pr.q_e.push(energy_source(s, x));
        }
        Ok(pr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundstates::bound_wavefunction;
    use crate::spectrum::find_real_roots;

    fn state(v0: f64, vi: f64, lambda: f64, which: usize) -> BoundState {
        let p = WellParams::new(v0, vi, 1.0, lambda).unwrap();
        let roots = find_real_roots(&p, 12.0, 600).unwrap();
        BoundState::new(&p, roots[which]).unwrap()
    }

    #[test]
    fn real_wavefunction_has_zero_flux() {
        let w = WavefunctionSample {
            x: 0.3,
            psi: Complex64::new(1.7, 0.0),
            dpsi: Complex64::new(-0.9, 0.0),
        };
        assert_eq!(probability_flux(&w), 0.0);
    }

    #[test]
    fn plane_wave_flux_is_2k() {
        let k = 1.3;
        let x = 0.42;
        let psi = Complex64::new(0.0, k * x).exp();
        let w = WavefunctionSample { x, psi, dpsi: Complex64::new(0.0, k) * psi };
        assert!((probability_flux(&w) - 2.0 * k).abs() < 1e-14);
    }

    #[test]
    fn closed_flux_matches_definition() {
        let s = state(9.0, 15.0, 0.5, 1);
        for i in 0..300 {
            let x = -3.0 + 6.0 * i as f64 / 299.0;
            let direct = probability_flux(&bound_wavefunction(&s, x));
            let closed = bound_flux(&s, x);
            assert!(
                (direct - closed).abs() <= 1e-10 * closed.abs().max(1e-12),
                "flux mismatch at x = {x}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn flux_vanishes_without_gain() {
        let s = state(9.0, 0.0, 0.7, 0);
        for &x in &[-2.0, -0.5, 0.0, 0.9, 3.0] {
            assert_eq!(bound_flux(&s, x), 0.0);
        }
    }

    #[test]
    fn source_term_antisymmetric_and_zero_inside() {
        let s = state(9.0, 15.0, 0.5, 0);
        assert_eq!(source_term(&s, 0.3), 0.0);
        for i in 1..100 {
            let x = 1.0 + 3.0 * i as f64 / 99.0;
            let q = source_term(&s, x);
            assert!((source_term(&s, -x) + q).abs() <= 1e-12 * q.abs().max(1e-300));
            assert!(q < 0.0, "drain side must lose density");
        }
    }

    #[test]
    fn stationary_continuity_outside() {
        // dJ/dx = Q_d by central differences away from the kinks
        let s = state(9.0, 15.0, 0.5, 1);
        let h = 1e-4;
        let scale = source_term(&s, -s.params.b - 1e-6).abs();
        for i in 0..200 {
            let x = -3.0 + 5.9 * i as f64 / 199.0;
            if (x.abs() - s.params.b).abs() < 10.0 * h || x.abs() < 10.0 * h {
                continue;
            }
            let dj = (bound_flux(&s, x + h) - bound_flux(&s, x - h)) / (2.0 * h);
            let q = source_term(&s, x);
            assert!(
                (dj - q).abs() <= 1e-6 * scale,
                "continuity violated at x = {x}: dJ = {dj}, Q = {q}"
            );
        }
    }

    #[test]
    fn energy_density_1_is_k2_rho() {
        let s = state(9.0, 15.0, 0.5, 2);
        for i in 0..100 {
            let x = -2.5 + 5.0 * i as f64 / 99.0;
            let r1 = energy_density_1(&s, x);
            let want = s.energy * bound_density(&s, x);
            assert!((r1 - want).abs() <= 1e-12 * want.abs().max(1e-300));
        }
    }

    #[test]
    fn energy_density_2_definition_vs_closed_form() {
        let s = state(9.0, 15.0, 0.5, 1);
        for i in 0..500 {
            let x = -3.0 + 6.0 * i as f64 / 499.0;
            if x == 0.0 {
                continue;
            }
            let (smooth, _) = energy_density_2(&s, x);
            let closed = energy_density_2_closed(&s, x);
            assert!(
                (smooth - closed).abs() <= 1e-10 * closed.abs().max(1e-12),
                "rho2E mismatch at x = {x}: {smooth} vs {closed}"
            );
        }
    }

    #[test]
    fn energy_density_2_jump_at_edge_is_v0_rho() {
        let s = state(9.0, 15.0, 0.5, 0);
        let b = s.params.b;
        let eps: f64 = 1e-12;
        for edge in [-b, b] {
            let inside = energy_density_2(&s, edge - eps.copysign(edge)).0;
            let outside = energy_density_2(&s, edge + eps.copysign(edge)).0;
            let jump = outside - inside;
            let want = s.params.v0 * bound_density(&s, edge);
            assert!(
                (jump - want).abs() <= 1e-9 * want.abs(),
                "rho2E jump at {edge}: {jump} vs {want}"
            );
        }
    }

    #[test]
    fn delta_point_mass_positive_for_positive_lambda() {
        let s = state(9.0, 15.0, 0.5, 0);
        let (_, pm) = energy_density_2(&s, 0.5);
        assert!(pm > 0.0);
        assert!((pm - s.params.lambda * bound_density(&s, 0.0)).abs() <= 1e-15 * pm);
        let s0 = state(9.0, 15.0, 0.0, 0);
        assert_eq!(delta_point_mass(&s0), 0.0);
    }

    #[test]
    fn defining_energy_fluxes_reduce_to_k2_jd() {
        let s = state(9.0, 15.0, 0.5, 1);
        for i in 0..300 {
            let x = -2.8 + 5.6 * i as f64 / 299.0;
            if x == 0.0 {
                continue;
            }
            let (j1, j2) = energy_flux_defining(&s, x, None);
            let want = energy_flux(&s, x);
            assert!((j1 - want).abs() <= 1e-10 * want.abs().max(1e-12), "J1E at {x}");
            assert!((j2 - j1).abs() <= 1e-10 * want.abs().max(1e-12), "J2E at {x}");
        }
    }

    #[test]
    fn energy_source_proportionality() {
        let s = state(9.0, 15.0, 0.5, 0);
        for &x in &[-2.0, -1.2, 0.4, 1.5, 2.5] {
            let qe = energy_source(&s, x);
            assert!((qe - s.energy * source_term(&s, x)).abs() <= 1e-12 * qe.abs().max(1e-300));
        }
    }

    #[test]
    fn lead_flux_closed_forms_match_wavefunction() {
        let p = WellParams::new(10.0, 10.0, 1.0, 0.5).unwrap();
        let k = 2.3;
        for inc in [Incidence::LeftToRight, Incidence::RightToLeft] {
            for &x in &[-2.5, -1.0, 1.0, 1.8] {
                let closed = scattering_fluxes(&p, k, inc, x).unwrap();
                let w = crate::scattering::scattering_wavefunction(&p, k, inc, x).unwrap();
                let direct = probability_flux(&w);
                assert!(
                    (closed - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                    "{inc:?} at x = {x}: {closed} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn hermitian_lead_fluxes() {
        // v0 = 0, v_I = 0, delta only: J(-b) = 2k(1 - R), J(b) = 2kT
        let p = WellParams::new(0.0, 0.0, 1.0, 2.0).unwrap();
        let k = 1.7;
        let d = scattering_coefficients(&p, k).unwrap();
        let j_in = scattering_fluxes(&p, k, Incidence::LeftToRight, -p.b).unwrap();
        let j_out = scattering_fluxes(&p, k, Incidence::LeftToRight, p.b).unwrap();
        assert!((j_in - 2.0 * k * (1.0 - d.r_plus_abs2)).abs() < 1e-12);
        assert!((j_out - 2.0 * k * d.transmission).abs() < 1e-12);
    }

    #[test]
    fn conservation_between_the_leads() {
        let p = WellParams::new(10.0, 10.0, 1.0, 0.5).unwrap();
        for &k in &[0.9, 2.3, 4.1, 7.6] {
            for inc in [Incidence::LeftToRight, Incidence::RightToLeft] {
                let jl = scattering_fluxes(&p, k, inc, -p.b).unwrap();
                let jr = scattering_fluxes(&p, k, inc, p.b).unwrap();
                assert!(
                    (jl - jr).abs() <= 1e-10 * jl.abs().max(jr.abs()),
                    "{inc:?} at k = {k}: J(-b) = {jl}, J(b) = {jr}"
                );
            }
        }
    }

    #[test]
    fn flux_unitarity_matches_algebraic() {
        let p = WellParams::new(10.0, 10.0, 1.0, 0.5).unwrap();
        for i in 1..200 {
            let k = 0.05 * i as f64;
            let res = unitarity_from_flux(&p, k).unwrap();
            assert!(res <= 1e-9, "flux unitarity residual {res:.3e} at k = {k}");
            let d = scattering_coefficients(&p, k).unwrap();
            assert!((res - d.unitarity_residual).abs() <= 1e-12);
        }
    }

    #[test]
    fn profile_has_constant_interior_flux_and_unit_norm() {
        let s = state(9.0, 15.0, 0.5, 0);
        let pr = TransportProfile::compute(&s, -6.0, 6.0, 2001).unwrap();
        let j0 = bound_flux(&s, 0.0);
        for (x, j) in pr.grid.iter().zip(pr.j_d.iter()) {
            if x.abs() < s.params.b {
                assert!((j - j0).abs() <= 1e-10 * j0.abs());
            }
        }
        assert!(pr.delta_point_mass > 0.0);
        assert!(TransportProfile::compute(&s, 1.0, -1.0, 100).is_err());
    }
}
