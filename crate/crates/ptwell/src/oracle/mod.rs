//! Independent numerical verification: a finite-difference Hamiltonian
//! eigensolver and adaptive quadrature. Used by the acceptance and validation
//! suites, never by the closed-form paths.

pub mod eig;
pub mod quad;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::well::{alpha_pair_real, WellParams};

pub use eig::{eigen_residual, eigenvalues_complex_sym_tridiag, inverse_iteration};
pub use quad::adaptive_quadrature;

/// Uniform Dirichlet grid on [-L, L] with N interior points, N odd so one
/// point sits exactly at the origin (where the delta lives).
#[derive(Debug, Clone, Copy)]
pub struct FDGrid {
    pub half_length: f64,
    pub n: usize,
}

impl FDGrid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box half-length {half_length} must be > 0"
            )));
        }
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs an odd interior point count >= 3, got {n}"
            )));
        }
        Ok(Self { half_length, n })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_length / (self.n + 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + (i + 1) as f64 * self.h()
    }

    /// Index of the grid point at x = 0.
    pub fn delta_index(&self) -> usize {
        (self.n - 1) / 2
    }
}

/// The discretized Hamiltonian: a complex symmetric tridiagonal operator.
#[derive(Debug, Clone)]
pub struct FDOperator {
    pub diag: Vec<Complex64>,
    pub off: Vec<Complex64>,
    pub grid: FDGrid,
}

/// Exact cell average of the three-piece potential over [lo, hi]; keeps the
/// eigenvalue error O(h^2) regardless of where +-b falls on the grid.
fn cell_averaged_potential(p: &WellParams, lo: f64, hi: f64) -> Complex64 {
    let w = hi - lo;
    let left = ((-p.b).min(hi) - lo).max(0.0) / w;
    let right = (hi - p.b.max(lo)).max(0.0) / w;
    Complex64::new(p.v0, p.vi) * left + Complex64::new(p.v0, -p.vi) * right
}

/// Second-order central-difference discretization of the Hamiltonian with
/// Dirichlet boundaries; the delta enters as a Lambda/h on-site term at the
/// center point.
pub fn discretize(p: &WellParams, g: &FDGrid) -> FDOperator {
    let h = g.h();
    let kin = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let x = g.x(i);
        let mut v = cell_averaged_potential(p, x - 0.5 * h, x + 0.5 * h);
        if i == g.delta_index() {
            v += p.lambda / h;
        }
        diag.push(Complex64::new(2.0 * kin, 0.0) + v);
    }
    let off = vec![Complex64::new(-kin, 0.0); g.n - 1];
    FDOperator { diag, off, grid: *g }
}

/// The `count` eigenvalues of the discretized operator with smallest |Re E|,
/// from the full direct eigendecomposition.
pub fn oracle_spectrum(p: &WellParams, g: &FDGrid, count: usize) -> Result<Vec<Complex64>> {
    if count > g.n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenvalues from an operator of dimension {}",
            g.n
        )));
    }
    let mut evs = oracle_full_spectrum(p, g)?;
    evs.sort_by(|a, b| a.re.abs().partial_cmp(&b.re.abs()).unwrap());
    evs.truncate(count);
    Ok(evs)
}

/// All eigenvalues of the discretized operator (unsorted cost is the same;
/// returned sorted by real part for reproducibility).
pub fn oracle_full_spectrum(p: &WellParams, g: &FDGrid) -> Result<Vec<Complex64>> {
    let op = discretize(p, g);
    let mut evs = eigenvalues_complex_sym_tridiag(&op.diag, &op.off)?;
    evs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(evs)
}

/// Eigenvector of the discretized operator for a known eigenvalue.
pub fn oracle_eigenvector(p: &WellParams, g: &FDGrid, e: Complex64) -> Result<Vec<Complex64>> {
    let op = discretize(p, g);
    inverse_iteration(&op.diag, &op.off, e)
}

/// Nearest spectrum member to `target` in the complex plane.
pub fn nearest_eigenvalue(spectrum: &[Complex64], target: Complex64) -> Option<Complex64> {
    spectrum
        .iter()
        .min_by(|a, b| {
            (*a - target)
                .norm_sqr()
                .partial_cmp(&(*b - target).norm_sqr())
                .unwrap()
        })
        .copied()
}

/// Box size that buries the truncation error of every listed state:
/// L = b + 30/alpha_R(k_min-decay).
pub fn recommended_half_length(p: &WellParams, ks: &[f64]) -> f64 {
    let ar_min = ks
        .iter()
        .map(|&k| alpha_pair_real(p, k).alpha_r)
        .fold(f64::INFINITY, f64::min);
    p.b + 30.0 / ar_min.max(1e-3)
}

/// Least-squares slope of ln(y) against ln(x); the power-law exponent fit
/// used by the scaling acceptance checks.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in lx.iter().zip(ly.iter()) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    num / den
}

/// Reference implementations kept deliberately independent of the closed-form
/// solver paths: textbook Hermitian-well root equations and the plane-wave
/// transfer matrix.
pub mod reference {
    use num_complex::Complex64;

    fn bisect_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n_seeds: usize) -> Vec<f64> {
        let mut roots = Vec::new();
        let dk = (hi - lo) / n_seeds as f64;
        let mut k_prev = lo;
        let mut f_prev = f(k_prev);
        for j in 1..=n_seeds {
            let k = lo + dk * j as f64;
            let v = f(k);
            if v == 0.0 {
                roots.push(k);
            } else if f_prev != 0.0 && v.signum() != f_prev.signum() {
                let (mut a, mut b) = (k_prev, k);
                let mut fa = f_prev;
                for _ in 0..90 {
                    let m = 0.5 * (a + b);
                    let fm = f(m);
                    if fm == 0.0 {
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            k_prev = k;
            f_prev = v;
        }
        roots
    }

    /// Even-parity bound states of the Hermitian finite well:
    /// k tan(kb) = sqrt(v0 - k^2), k in (0, sqrt(v0)).
    pub fn hermitian_even_roots(v0: f64, b: f64) -> Vec<f64> {
        let kmax = v0.sqrt() * (1.0 - 1e-12);
        bisect_roots(
            |k| k * (k * b).sin() - (v0 - k * k).sqrt() * (k * b).cos(),
            1e-9,
            kmax,
            4000,
        )
    }

    /// Odd-parity bound states: k cot(kb) = -sqrt(v0 - k^2).
    pub fn hermitian_odd_roots(v0: f64, b: f64) -> Vec<f64> {
        let kmax = v0.sqrt() * (1.0 - 1e-12);
        bisect_roots(
            |k| k * (k * b).cos() + (v0 - k * k).sqrt() * (k * b).sin(),
            1e-9,
            kmax,
            4000,
        )
    }

    /// Even-parity states of the Hermitian well with the central delta:
    /// Lambda(k cos kb + aR sin kb) + 2k(aR cos kb - k sin kb) = 0.
    pub fn hermitian_even_delta_roots(v0: f64, b: f64, lambda: f64) -> Vec<f64> {
        let kmax = v0.sqrt() * (1.0 - 1e-12);
        bisect_roots(
            |k| {
                let ar = (v0 - k * k).sqrt();
                let (c, s) = ((k * b).cos(), (k * b).sin());
                lambda * (k * c + ar * s) + 2.0 * k * (ar * c - k * s)
            },
            1e-9,
            kmax,
            4000,
        )
    }

    /// Plane-wave transfer matrix of the Hermitian square barrier/well for
    /// k^2 > v0 (exterior momentum q = sqrt(k^2 - v0)), in the same amplitude
    /// convention as `scattering::transfer_matrix`: [A1, A2] -> [B2, B1] with
    /// left basis (e^{iqx}, e^{-iqx}) and right basis (e^{iqx}, e^{-iqx})
    /// ordered as (B2, B1) = (rightward, leftward).
    pub fn square_well_transfer_matrix(v0: f64, b: f64, k: f64) -> [Complex64; 4] {
        let q = (k * k - v0).sqrt();
        let i = Complex64::new(0.0, 1.0);
        let (c, s) = ((k * b).cos(), (k * b).sin());
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (col, (a1, a2)) in [(1.0, 0.0), (0.0, 1.0)].iter().enumerate() {
            let psi = a1 * (-i * q * b).exp() + a2 * (i * q * b).exp();
            let dpsi = i * q * (a1 * (-i * q * b).exp() - a2 * (i * q * b).exp());
            let pc = psi * c + dpsi * s / k;
            let qc = -psi * s + dpsi * c / k;
            let psi_b = pc * c + qc * s;
            let dpsi_b = k * (-pc * s + qc * c);
            let b2 = (psi_b + dpsi_b / (i * q)) * 0.5 * (-i * q * b).exp();
            let b1 = (psi_b - dpsi_b / (i * q)) * 0.5 * (i * q * b).exp();
            out[col] = b2;
            out[col + 2] = b1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation_and_geometry() {
        assert!(FDGrid::new(10.0, 100).is_err());
        assert!(FDGrid::new(0.0, 101).is_err());
        let g = FDGrid::new(12.0, 4001).unwrap();
        assert_eq!(g.delta_index(), 2000);
        assert!((g.x(g.delta_index())).abs() < 1e-12);
        assert!((g.x(0) + 12.0 - g.h()).abs() < 1e-12);
    }

    #[test]
    fn particle_in_a_box_spectrum() {
        // v = 0, Lambda = 0: FD eigenvalues are exactly 2/h^2 (1 - cos(j pi/(N+1)));
        // they converge to (j pi / 2L)^2 at O(h^2)
        let p = WellParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let g = FDGrid::new(std::f64::consts::PI, 301).unwrap();
        let evs = oracle_spectrum(&p, &g, 4).unwrap();
        let h = g.h();
        for (j, e) in evs.iter().enumerate() {
            assert!(e.im.abs() < 1e-12);
            let exact_fd = 2.0 / (h * h)
                * (1.0 - ((j + 1) as f64 * std::f64::consts::PI / (g.n + 1) as f64).cos());
            assert!((e.re - exact_fd).abs() <= 1e-9 * exact_fd.max(1.0));
            let continuum = ((j + 1) as f64 / 2.0).powi(2);
            assert!((e.re - continuum).abs() <= 2.0 * continuum * h * h);
        }
    }

    #[test]
    fn matrix_is_complex_symmetric_with_gain_loss() {
        let p = WellParams::new(9.0, 15.0, 1.0, 0.5).unwrap();
        let g = FDGrid::new(8.0, 201).unwrap();
        let op = discretize(&p, &g);
        // off-diagonals are a single shared band: symmetry is structural;
        // gain/loss shows up as conjugate diagonals under x -> -x
        for i in 0..g.n {
            let j = g.n - 1 - i;
            assert!(
                (op.diag[i] - op.diag[j].conj()).norm() <= 1e-12 * op.diag[i].norm(),
                "PT symmetry of the discretization broken at {i}"
            );
        }
        let has_gain = op.diag.iter().any(|d| d.im > 1.0);
        let has_loss = op.diag.iter().any(|d| d.im < -1.0);
        assert!(has_gain && has_loss);
    }

    #[test]
    fn hermitian_well_matches_textbook_roots() {
        let p = WellParams::new(9.0, 0.0, 1.0, 0.0).unwrap();
        let g = FDGrid::new(9.0, 1501).unwrap();
        let evs = oracle_spectrum(&p, &g, 2).unwrap();
        let mut ks: Vec<f64> = reference::hermitian_even_roots(9.0, 1.0);
        ks.extend(reference::hermitian_odd_roots(9.0, 1.0));
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ks.len(), 2);
        let h = g.h();
        for (e, k) in evs.iter().zip(ks.iter()) {
            let want = k * k;
            assert!(
                (e.re - want).abs() <= 4.0 * want * h * h + 1e-6,
                "E = {} vs k^2 = {want}",
                e.re
            );
        }
    }

    #[test]
    fn loglog_slope_recovers_powers() {
        let xs: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.5)).collect();
        assert!((fit_loglog_slope(&xs, &ys) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn count_limited_by_dimension() {
        let p = WellParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let g = FDGrid::new(3.0, 11).unwrap();
        assert!(oracle_spectrum(&p, &g, 12).is_err());
    }
}
