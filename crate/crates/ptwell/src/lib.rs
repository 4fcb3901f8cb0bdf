//! Bound-state spectra, exceptional points, scattering coefficients, and
//! probability/energy transport of a PT-symmetric finite square well with a
//! delta potential at the origin.
//!
//! All quantities use reduced units (hbar = 1, m = 1/2), so E = k^2 and the
//! well is described by `WellParams { v0, vi, b, lambda }`. The closed-form
//! solver modules are independent of the `oracle` module, which provides the
//! finite-difference eigensolver and quadrature used for verification.

pub mod boundstates;
pub mod error;
pub mod oracle;
pub mod scattering;
pub mod spectrum;
pub mod transport;
pub mod units;
pub mod validate;
pub mod well;

pub use boundstates::{
    alpha_r_small_vi, bound_density, bound_wavefunction, bound_wavefunction_sided,
    normalization_constant, BoundState, Side, WavefunctionSample,
};
pub use error::{Error, Result};
pub use scattering::{
    scattering_coefficients, scattering_wavefunction, transfer_matrix, unitarity_check,
    Incidence, ScatterData, TransferMatrix,
};
pub use spectrum::{
    asymptotic_sin2kb, continue_branch, ep_bound_curve, find_real_roots,
    locate_exceptional_point, pt_phase_parts, pt_phase_residual, secular_residual,
    trace_spectrum, EPRecord, SpectralBranch, SpectrumTrace,
};
pub use transport::{
    bound_flux, energy_density_1, energy_density_2, energy_flux, probability_flux,
    scattering_fluxes, source_term, unitarity_from_flux, TransportProfile,
};
pub use well::{alpha_pair, complex_potential, reduce, AlphaPair, PhysicalParams, WellParams};
