//! Reduced-unit constants.
//!
//! Everything internal uses hbar = 1, m = 1/2, so hbar^2/2m = 1 and E = k^2.
//! The reduced potential strengths (v0, v_I, Lambda) are then the native
//! parameters and every dimensional prefactor collapses to one of the
//! constants below. They are spelled out so each transport formula stays
//! auditable term by term.

/// hbar/m, the probability-flux prefactor in J = (hbar/m) Im(psi* psi').
pub const HBAR_OVER_M: f64 = 2.0;

/// hbar^2/2m, the kinetic prefactor; E = HBAR2_OVER_2M * k^2.
pub const HBAR2_OVER_2M: f64 = 1.0;

/// 2/hbar as it appears in Q = (2 V_I/hbar) rho; with V_I = v_I hbar^2/2m this
/// combines to (hbar/m) v_I rho, i.e. the same numerical constant as HBAR_OVER_M.
pub const TWO_OVER_HBAR: f64 = 2.0;
