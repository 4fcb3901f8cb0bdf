//! Secular equation, real-root search, continuation of bound-state branches
//! in the delta strength, and exceptional-point location.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::well::{alpha_pair, alpha_pair_real, WellParams};

/// Tolerance below which two polished roots are considered the same.
pub const DEDUP_TOL: f64 = 1e-8;
/// |Im k| below which a root counts as real.
pub const IMAG_TOL: f64 = 1e-10;

/// One bound-state branch k(Lambda) traced by continuation.
///
/// Samples are ordered by strictly increasing Lambda. Before the exceptional
/// point (if any) the recorded k are real to `IMAG_TOL`; past it the branch
/// carries one member of the complex-conjugate pair.
#[derive(Debug, Clone)]
pub struct SpectralBranch {
    pub branch_id: usize,
    pub samples: Vec<(f64, Complex64)>,
    /// (Lambda*, k*) where the branch coalesced with its partner.
    pub ep: Option<(f64, f64)>,
    /// chi = Lambda* k*, the invariant of the large-k asymptotics.
    pub chi: Option<f64>,
}

impl SpectralBranch {
    /// Last sample with |Im k| <= IMAG_TOL, if any.
    pub fn last_real_sample(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .rev()
            .find(|(_, k)| k.im.abs() <= IMAG_TOL)
            .map(|&(l, k)| (l, k.re))
    }
}

/// A located exceptional point.
#[derive(Debug, Clone, Copy)]
pub struct EPRecord {
    pub lambda_star: f64,
    pub k_star: f64,
    pub branch_pair: (usize, usize),
    /// max(|f|, |df/dk|) at the solution of the double-root system.
    pub residual: f64,
    /// kappa(Lambda*) = sqrt(v0^2 + v_I^2)/Lambda*.
    pub kappa_bound: f64,
}

/// The transcendental secular equation f(k) of the bound states,
/// (k^2 + a a~)L + (2k^2(a + a~) + (k^2 - a a~)L) cos 2kb
///   + k (2(a a~ - k^2) + (a + a~)L) sin 2kb,
/// evaluated for complex k. Real для real k in the PT-symmetric phase.
pub fn secular_residual(p: &WellParams, k: Complex64) -> Complex64 {
    let a = alpha_pair(p, k);
    let (al, at) = (a.alpha, a.alpha_tilde);
    let k2 = k * k;
    let prod = al * at;
    let sum = al + at;
    let phase = 2.0 * p.b * k;
    let t1 = (k2 + prod) * p.lambda;
    let t2 = (2.0 * k2 * sum + (k2 - prod) * p.lambda) * phase.cos();
    let t3 = k * (2.0 * (prod - k2) + sum * p.lambda) * phase.sin();
    t1 + t2 + t3
}

/// Natural magnitude of the secular residual at k: the sum of the absolute
/// values of its three addends. Used to scale convergence tolerances.
pub fn secular_scale(p: &WellParams, k: Complex64) -> f64 {
    let a = alpha_pair(p, k);
    let (al, at) = (a.alpha, a.alpha_tilde);
    let k2 = k * k;
    let prod = al * at;
    let sum = al + at;
    let phase = 2.0 * p.b * k;
    let t1 = (k2 + prod) * p.lambda;
    let t2 = (2.0 * k2 * sum + (k2 - prod) * p.lambda) * phase.cos();
    let t3 = k * (2.0 * (prod - k2) + sum * p.lambda) * phase.sin();
    t1.norm() + t2.norm() + t3.norm() + 1.0
}

/// Analytic df/dk of the secular residual, using d(alpha)/dk = -k/alpha.
/// Errors when alpha or alpha~ vanishes (v_I = 0 with k^2 = v0).
pub(crate) fn secular_residual_dk(p: &WellParams, k: Complex64) -> Result<Complex64> {
    let a = alpha_pair(p, k);
    let (al, at) = (a.alpha, a.alpha_tilde);
    if al.norm() < 1e-14 * (1.0 + k.norm_sqr()) || at.norm() < 1e-14 * (1.0 + k.norm_sqr()) {
        return Err(Error::Singular(
            "secular derivative undefined where alpha = 0 (v_I = 0, k^2 = v0)".into(),
        ));
    }
    let k2 = k * k;
    let prod = al * at;
    let sum = al + at;
    let dprod = -k * (sum * sum - 2.0 * prod) / prod;
    let dsum = -k * sum / prod;
    let (b, l) = (p.b, p.lambda);
    let phase = 2.0 * b * k;
    let (s2, c2) = (phase.sin(), phase.cos());
    let g2 = 2.0 * k2 * sum + (k2 - prod) * l;
    let g3 = 2.0 * (prod - k2) + sum * l;
    let dg2 = 4.0 * k * sum + 2.0 * k2 * dsum + (2.0 * k - dprod) * l;
    let dg3 = 2.0 * (dprod - 2.0 * k) + dsum * l;
    Ok((2.0 * k + dprod) * l + dg2 * c2 - g2 * (2.0 * b) * s2
        + (g3 + k * dg3) * s2 + k * g3 * (2.0 * b) * c2)
}

/// The two addends of the PT-symmetric-phase form of the secular equation:
/// (hermitian, non-hermitian). Their sum vanishes at bound-state k.
pub fn pt_phase_parts(p: &WellParams, k: f64) -> (f64, f64) {
    let a = alpha_pair_real(p, k);
    let (ar, ai) = (a.alpha_r, a.alpha_i);
    let (c, s) = ((k * p.b).cos(), (k * p.b).sin());
    let kc = k * c + ar * s;
    let herm = (2.0 * p.lambda * kc + 4.0 * k * (ar * c - k * s)) * kc;
    let nonherm = 2.0 * ai * ai * s * (2.0 * k * c + p.lambda * s);
    (herm, nonherm)
}

/// Real-valued secular residual in the PT-symmetric phase (the sum of the
/// two `pt_phase_parts` addends).
pub fn pt_phase_residual(p: &WellParams, k: f64) -> f64 {
    let (h, n) = pt_phase_parts(p, k);
    h + n
}

/// Scale companion of `pt_phase_residual` for relative tolerances.
pub fn pt_phase_scale(p: &WellParams, k: f64) -> f64 {
    let a = alpha_pair_real(p, k);
    let (ar, ai) = (a.alpha_r, a.alpha_i);
    let (c, s) = ((k * p.b).cos(), (k * p.b).sin());
    let kc = k * c + ar * s;
    (2.0 * p.lambda * kc * kc).abs()
        + (4.0 * k * (ar * c - k * s) * kc).abs()
        + (2.0 * ai * ai * s * (2.0 * k * c + p.lambda * s)).abs()
        + 1.0
}

/// Default seed count for the root grid: at least 400 and at least 40 seeds
/// per unit of k_max * b (root spacing is ~ pi/2b).
pub fn default_n_seeds(p: &WellParams, k_max: f64) -> usize {
    ((40.0 * k_max * p.b).ceil() as usize).max(400)
}

/// All real roots of the secular equation in (0, k_max], found by sign-change
/// bracketing on a uniform grid, bisection, and Newton polish to
/// |f| <= 1e-12 * scale. Deduplicated and sorted ascending.
pub fn find_real_roots(p: &WellParams, k_max: f64, n_seeds: usize) -> Result<Vec<f64>> {
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} must be > 0")));
    }
    if n_seeds < 2 {
        return Err(Error::InvalidParameter(format!("n_seeds = {n_seeds} must be >= 2")));
    }
    let mut roots = Vec::new();
    let dk = k_max / n_seeds as f64;
    let mut k_prev = dk;
    let mut f_prev = pt_phase_residual(p, k_prev);
    for j in 2..=n_seeds {
        let k = dk * j as f64;
        let f = pt_phase_residual(p, k);
        if f == 0.0 {
            roots.push(k);
        } else if f_prev != 0.0 && f.signum() != f_prev.signum() {
            let r = bisect_then_polish(p, k_prev, k);
            roots.push(r);
        }
        k_prev = k;
        f_prev = f;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL);
    Ok(roots)
}

fn bisect_then_polish(p: &WellParams, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = pt_phase_residual(p, lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = pt_phase_residual(p, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    // Newton polish with finite-difference derivative
    for _ in 0..8 {
        let f = pt_phase_residual(p, k);
        if f.abs() <= 1e-13 * pt_phase_scale(p, k) {
            break;
        }
        let h = 1e-7 * (1.0 + k.abs());
        let df = (pt_phase_residual(p, k + h) - pt_phase_residual(p, k - h)) / (2.0 * h);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        if !step.is_finite() || step.abs() > hi - lo + 1e-6 {
            break;
        }
        k -= step;
    }
    k
}

/// Complex Newton corrector on the secular residual with a central-difference
/// Jacobian (h = 1e-7 (1 + |k|)).
fn newton_complex(p: &WellParams, seed: Complex64, max_iter: usize) -> Result<Complex64> {
    let mut k = seed;
    for _ in 0..max_iter {
        let f = secular_residual(p, k);
        if f.norm() <= 1e-12 * secular_scale(p, k) {
            return Ok(k);
        }
        let h = 1e-7 * (1.0 + k.norm());
        let df = (secular_residual(p, k + Complex64::new(h, 0.0))
            - secular_residual(p, k - Complex64::new(h, 0.0)))
            / (2.0 * h);
        if df.norm() == 0.0 || !df.is_finite() {
            return Err(Error::NoConvergence("vanishing secular derivative".into()));
        }
        let step = f / df;
        if !step.is_finite() {
            return Err(Error::NoConvergence("non-finite Newton step".into()));
        }
        k -= step;
    }
    let f = secular_residual(p, k);
    if f.norm() <= 1e-10 * secular_scale(p, k) {
        Ok(k)
    } else {
        Err(Error::NoConvergence(format!(
            "complex Newton did not converge from seed {seed}: |f| = {:.3e}",
            f.norm()
        )))
    }
}

/// Solve the double-root system f(k, Lambda) = 0, df/dk(k, Lambda) = 0 by a
/// damped 2x2 Newton iteration. Returns (Lambda*, k*, residual) with
/// residual = max(|f|, |df/dk|).
pub(crate) fn ep_from_seed(p: &WellParams, k_seed: f64, lambda_seed: f64) -> Result<(f64, f64, f64)> {
    let eval = |k: f64, l: f64| -> Result<(f64, f64)> {
        let pl = p.with_lambda(l.max(0.0));
        let kk = Complex64::new(k, 0.0);
        let f = secular_residual(&pl, kk).re;
        let fk = secular_residual_dk(&pl, kk)?.re;
        Ok((f, fk))
    };
    let mut k = k_seed;
    let mut l = lambda_seed.max(1e-12);
    let (mut f, mut fk) = eval(k, l)?;
    let mut best = f.hypot(fk);
    for _ in 0..80 {
        if f.abs().max(fk.abs()) <= 1e-12 {
            break;
        }
        let hk = 1e-6 * (1.0 + k.abs());
        let hl = 1e-6 * (1.0 + l.abs());
        let (f_kp, fk_kp) = eval(k + hk, l)?;
        let (f_km, fk_km) = eval(k - hk, l)?;
        let (f_lp, fk_lp) = eval(k, l + hl)?;
        let (f_lm, fk_lm) = eval(k, (l - hl).max(0.0))?;
        let dl_used = l + hl - (l - hl).max(0.0);
        let j11 = (f_kp - f_km) / (2.0 * hk);
        let j12 = (f_lp - f_lm) / dl_used;
        let j21 = (fk_kp - fk_km) / (2.0 * hk);
        let j22 = (fk_lp - fk_lm) / dl_used;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(Error::NoConvergence("singular Jacobian in EP solve".into()));
        }
        let dk = (f * j22 - fk * j12) / det;
        let dl = (fk * j11 - f * j21) / det;
        // backtracking line search
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..10 {
            let kn = k - t * dk;
            let ln = l - t * dl;
            if ln > 0.0 && kn > 0.0 {
                if let Ok((fn_, fkn)) = eval(kn, ln) {
                    let norm = fn_.hypot(fkn);
                    if norm < best {
                        k = kn;
                        l = ln;
                        f = fn_;
                        fk = fkn;
                        best = norm;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = f.abs().max(fk.abs());
    if residual <= 1e-10 {
        Ok((l, k, residual))
    } else {
        Err(Error::NoConvergence(format!(
            "EP Newton stalled at residual {residual:.3e} (k = {k}, Lambda = {l})"
        )))
    }
}

/// Polish a root seed with the complex Newton corrector.
pub(crate) fn refine_root(p: &WellParams, seed: Complex64) -> Result<Complex64> {
    newton_complex(p, seed, 50)
}

/// Gap between the two real roots of a merging pair at Lambda* - eps,
/// bracketed around k* by the local fold model and resolved by bisection.
pub(crate) fn pair_gap_below_ep(
    p: &WellParams,
    k_star: f64,
    lambda_star: f64,
    eps: f64,
) -> Result<f64> {
    let q = ep_fold_coefficient(p, k_star, lambda_star)?;
    let delta = (q.abs() * eps).sqrt();
    let pl = p.with_lambda(lambda_star - eps);
    let f = |k: f64| pt_phase_residual(&pl, k);
    let bisect = |mut lo: f64, mut hi: f64| -> Result<f64> {
        let mut f_lo = f(lo);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() == f(hi).signum() {
            return Err(Error::NoConvergence(format!(
                "no sign change in [{lo}, {hi}] at eps = {eps}"
            )));
        }
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == f_lo.signum() {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    // between the two roots f has the opposite sign to the outside
    let mut w = 2.5 * delta;
    for _ in 0..8 {
        if f(k_star - w).signum() != f(k_star).signum()
            && f(k_star + w).signum() != f(k_star).signum()
        {
            break;
        }
        w *= 1.7;
    }
    let lo = bisect(k_star - w, k_star)?;
    let hi = bisect(k_star, k_star + w)?;
    Ok(hi - lo)
}

/// Local fold model at an EP: k ~ k* +- sqrt(q (Lambda - Lambda*)) with
/// q = -2 f_Lambda / f_kk. Negative q(Lambda - Lambda*) means the pair is complex.
fn ep_fold_coefficient(p: &WellParams, k_star: f64, lambda_star: f64) -> Result<f64> {
    let pl = p.with_lambda(lambda_star);
    let kk = Complex64::new(k_star, 0.0);
    let hk = 1e-5 * (1.0 + k_star.abs());
    let fkk = (secular_residual_dk(&pl, kk + Complex64::new(hk, 0.0))?.re
        - secular_residual_dk(&pl, kk - Complex64::new(hk, 0.0))?.re)
        / (2.0 * hk);
    let hl = 1e-6 * (1.0 + lambda_star.abs());
    let fl = (secular_residual(&p.with_lambda(lambda_star + hl), kk).re
        - secular_residual(&p.with_lambda((lambda_star - hl).max(0.0)), kk).re)
        / (lambda_star + hl - (lambda_star - hl).max(0.0));
    if fkk == 0.0 {
        return Err(Error::NoConvergence("vanishing f_kk at EP".into()));
    }
    Ok(-2.0 * fl / fkk)
}

/// Trace k(Lambda) from a root k0 at `lambda_range.0` by predictor-corrector
/// continuation. If the branch reaches its exceptional point inside the
/// range, the EP is located by the double-root solve, recorded on the branch,
/// and continuation switches to complex k (this branch keeps the +Im member
/// of the conjugate pair).
pub fn continue_branch(
    p: &WellParams,
    k0: f64,
    lambda_range: (f64, f64),
    step: f64,
) -> Result<SpectralBranch> {
    continue_branch_with_id(p, k0, lambda_range, step, 0)
}

pub(crate) fn continue_branch_with_id(
    p: &WellParams,
    k0: f64,
    lambda_range: (f64, f64),
    step: f64,
    branch_id: usize,
) -> Result<SpectralBranch> {
    let (l_start, l_end) = lambda_range;
    if !(step > 0.0) || l_end < l_start {
        return Err(Error::InvalidParameter(
            "continuation needs step > 0 and an increasing Lambda range".into(),
        ));
    }
    let p0 = p.with_lambda(l_start);
    let k_start = newton_complex(&p0, Complex64::new(k0, 0.0), 30)
        .map_err(|_| Error::InvalidParameter(format!("k0 = {k0} is not a root at Lambda = {l_start}")))?;
    let mut branch = SpectralBranch {
        branch_id,
        samples: vec![(l_start, k_start)],
        ep: None,
        chi: None,
    };
    let jump_guard = 0.45 * std::f64::consts::FRAC_PI_2 / p.b;
    let mut l = l_start;
    let mut k = k_start;
    let mut h = step.min(l_end - l_start);
    if h == 0.0 {
        return Ok(branch);
    }
    let mut successes = 0usize;
    let mut halvings = 0usize;
    while l < l_end {
        let h_eff = h.min(l_end - l);
        let l_next = l + h_eff;
        // predictor: linear extrapolation from the last two samples
        let seed = match branch.samples.len() {
            0 | 1 => k,
            n => {
                let (l1, k1) = branch.samples[n - 2];
                let (l2, k2) = branch.samples[n - 1];
                if l2 > l1 {
                    k2 + (k2 - k1) / (l2 - l1) * (l_next - l2)
                } else {
                    k
                }
            }
        };
        let pl = p.with_lambda(l_next);
        match newton_complex(&pl, seed, 30) {
            Ok(k_new) if (k_new - seed).norm() <= jump_guard && k_new.re > 0.0 => {
                l = l_next;
                k = k_new;
                branch.samples.push((l, k));
                successes += 1;
                halvings = 0;
                if successes >= 5 {
                    h = (2.0 * h).min(step);
                    successes = 0;
                }
            }
            _ => {
                successes = 0;
                halvings += 1;
                h *= 0.5;
                if halvings > 3 {
                    // Merging pairs make the corrector fail just past Lambda*;
                    // try the double-root solve before declaring a stall.
                    // No coalescence is possible without gain/loss.
                    if p.vi > 0.0 && k.im.abs() <= IMAG_TOL {
                        if let Ok((l_star, k_star, _res)) = ep_from_seed(p, k.re, l) {
                            if l_star >= l - step && l_star <= l_end + step {
                                branch.ep = Some((l_star, k_star));
                                branch.chi = Some(l_star * k_star);
                                continue_complex_past_ep(p, &mut branch, l_star, k_star, l_end, step)?;
                                return Ok(branch);
                            }
                        }
                    }
                    return Err(Error::ContinuationStall(format!(
                        "corrector failed near Lambda = {l_next} (k = {k}) after 3 step halvings"
                    )));
                }
            }
        }
    }
    Ok(branch)
}

fn continue_complex_past_ep(
    p: &WellParams,
    branch: &mut SpectralBranch,
    l_star: f64,
    k_star: f64,
    l_end: f64,
    step: f64,
) -> Result<()> {
    if l_star >= l_end {
        return Ok(());
    }
    let q = ep_fold_coefficient(p, k_star, l_star)?;
    let mut l = l_star;
    let mut h = (step * 0.25).min(l_end - l_star).max(1e-9);
    let mut k = Complex64::new(k_star, 0.0);
    let mut first = true;
    let mut halvings = 0usize;
    while l < l_end {
        let h_eff = h.min(l_end - l);
        let l_next = l + h_eff;
        let seed = if first {
            let rad = q * (l_next - l_star);
            if rad >= 0.0 {
                // fold opens toward real k: nothing complex to trace
                Complex64::new(k_star + rad.sqrt(), 0.0)
            } else {
                Complex64::new(k_star, (-rad).sqrt())
            }
        } else {
            k
        };
        let pl = p.with_lambda(l_next);
        match newton_complex(&pl, seed, 40) {
            Ok(k_new) => {
                // keep the +Im member; the partner branch is its conjugate
                let k_new = if k_new.im < 0.0 { k_new.conj() } else { k_new };
                l = l_next;
                k = k_new;
                branch.samples.push((l, k));
                first = false;
                halvings = 0;
                h = (1.5 * h).min(step);
            }
            Err(e) => {
                halvings += 1;
                h *= 0.5;
                if halvings > 6 {
                    return Err(Error::ContinuationStall(format!(
                        "complex continuation failed past the EP at Lambda = {l_next}: {e}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Window inside which two branches are accepted as a merging pair.
pub fn pair_merge_window(p: &WellParams) -> f64 {
    0.25 * std::f64::consts::FRAC_PI_2 / p.b
}

/// Locate the exceptional point where two traced branches coalesce by solving
/// the double-root system with a damped Newton iteration seeded from the
/// branches' closest approach.
pub fn locate_exceptional_point(
    p: &WellParams,
    branch_a: &SpectralBranch,
    branch_b: &SpectralBranch,
) -> Result<EPRecord> {
    let (la, _) = branch_a
        .last_real_sample()
        .ok_or_else(|| Error::NotAPair("branch A has no real samples".into()))?;
    let (lb, _) = branch_b
        .last_real_sample()
        .ok_or_else(|| Error::NotAPair("branch B has no real samples".into()))?;
    // compare both branches at the upper end of the common real range
    let l_common = la.min(lb);
    let k_at = |br: &SpectralBranch| -> f64 {
        br.samples
            .iter()
            .filter(|(_, k)| k.im.abs() <= IMAG_TOL)
            .min_by(|(l1, _), (l2, _)| {
                (l1 - l_common).abs().partial_cmp(&(l2 - l_common).abs()).unwrap()
            })
            .map(|&(_, k)| k.re)
            .unwrap()
    };
    let (ka_c, kb_c) = (k_at(branch_a), k_at(branch_b));
    let gap = (ka_c - kb_c).abs();
    if gap > pair_merge_window(p) {
        return Err(Error::NotAPair(format!(
            "branches are {gap:.4} apart in k at Lambda = {l_common}, window = {:.4}",
            pair_merge_window(p)
        )));
    }
    let (l_star, k_star, residual) = ep_from_seed(p, 0.5 * (ka_c + kb_c), la.max(lb))?;
    Ok(EPRecord {
        lambda_star: l_star,
        k_star,
        branch_pair: (branch_a.branch_id, branch_b.branch_id),
        residual,
        kappa_bound: ep_bound_curve(p, l_star)?,
    })
}

/// kappa(Lambda) = sqrt(v0^2 + v_I^2)/Lambda, the curve bounding the
/// large-k solutions (and hence the exceptional points).
pub fn ep_bound_curve(p: &WellParams, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter(
            "kappa(Lambda) diverges at Lambda = 0".into(),
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("Lambda = {lambda} must be > 0")));
    }
    Ok((p.v0 * p.v0 + p.vi * p.vi).sqrt() / lambda)
}

/// The two large-k solutions sin(2kb) = (v0 chi +- sqrt(v_I^2 (v0^2 + v_I^2 - chi^2)))
/// / (v0^2 + v_I^2), or None when chi^2 > v0^2 + v_I^2 (the bound of the
/// asymptotic analysis).
pub fn asymptotic_sin2kb(p: &WellParams, chi: f64) -> Option<(f64, f64)> {
    let w = p.v0 * p.v0 + p.vi * p.vi;
    let disc = p.vi * p.vi * (w - chi * chi);
    if disc < 0.0 || w == 0.0 {
        if w == 0.0 && chi == 0.0 {
            return None;
        }
        if disc < 0.0 {
            return None;
        }
    }
    let root = disc.sqrt();
    Some(((p.v0 * chi + root) / w, (p.v0 * chi - root) / w))
}

/// Result of tracing the whole spectrum over a Lambda range.
#[derive(Debug, Clone)]
pub struct SpectrumTrace {
    pub branches: Vec<SpectralBranch>,
    pub eps: Vec<EPRecord>,
    /// Per-branch continuation problems that did not abort the sweep.
    pub warnings: Vec<String>,
}

/// Continue every root found at `lambda_range.0` across the range, pair up
/// coalescing branches, and collect their exceptional points. Post-EP samples
/// of the two partners carry conjugate k values.
pub fn trace_spectrum(
    p: &WellParams,
    lambda_range: (f64, f64),
    step: f64,
    k_max: f64,
) -> Result<SpectrumTrace> {
    let seeds = find_real_roots(
        &p.with_lambda(lambda_range.0),
        k_max,
        default_n_seeds(p, k_max),
    )?;
    let mut branches = Vec::new();
    let mut warnings = Vec::new();
    for (id, &k0) in seeds.iter().enumerate() {
        match continue_branch_with_id(p, k0, lambda_range, step, id) {
            Ok(br) => branches.push(br),
            Err(e) => {
                warnings.push(format!("branch {id} (k0 = {k0:.6}): {e}"));
                branches.push(SpectralBranch {
                    branch_id: id,
                    samples: vec![(lambda_range.0, Complex64::new(k0, 0.0))],
                    ep: None,
                    chi: None,
                });
            }
        }
    }
    // group branches by shared EP and conjugate the second member past it
    let mut eps: Vec<EPRecord> = Vec::new();
    let mut claimed: Vec<(usize, f64, f64)> = Vec::new();
    for i in 0..branches.len() {
        let Some((l_star, k_star)) = branches[i].ep else { continue };
        if let Some(&(j, _, _)) = claimed
            .iter()
            .find(|(_, l, k)| (l - l_star).abs() < 1e-5 * (1.0 + l_star.abs())
                && (k - k_star).abs() < 1e-5 * (1.0 + k_star.abs()))
        {
            // second member of the pair: flip its post-EP samples
            let l_cut = l_star;
            for (l, k) in branches[i].samples.iter_mut() {
                if *l > l_cut && k.im > 0.0 {
                    *k = k.conj();
                }
            }
            for ep in eps.iter_mut() {
                if ep.branch_pair.0 == j && ep.branch_pair.1 == j {
                    ep.branch_pair = (j, i);
                }
            }
        } else {
            claimed.push((i, l_star, k_star));
            let residual = match ep_from_seed(p, k_star, l_star) {
                Ok((_, _, r)) => r,
                Err(_) => f64::NAN,
            };
            eps.push(EPRecord {
                lambda_star: l_star,
                k_star,
                branch_pair: (i, i),
                residual,
                kappa_bound: ep_bound_curve(p, l_star).unwrap_or(f64::INFINITY),
            });
        }
    }
    Ok(SpectrumTrace { branches, eps, warnings })
}

/// Track a root family across an arbitrary parameter sweep by re-solving at
/// each value and matching each root to the previous one by proximity.
/// Returns one (value, k) series per starting root; a series stops when its
/// root can no longer be matched.
pub fn track_roots_over<F>(
    values: &[f64],
    params_at: F,
    k_max: f64,
) -> Result<Vec<Vec<(f64, f64)>>>
where
    F: Fn(f64) -> WellParams,
{
    let Some(&first) = values.first() else {
        return Ok(Vec::new());
    };
    let p0 = params_at(first);
    let roots0 = find_real_roots(&p0, k_max, default_n_seeds(&p0, k_max))?;
    let mut series: Vec<Vec<(f64, f64)>> =
        roots0.iter().map(|&k| vec![(first, k)]).collect();
    for &v in &values[1..] {
        let p = params_at(v);
        let roots = find_real_roots(&p, k_max, default_n_seeds(&p, k_max))?;
        for s in series.iter_mut() {
            let &(_, k_prev) = s.last().unwrap();
            if s.len() + 1 < values.len() + 1 {
                if let Some(&k_new) = roots
                    .iter()
                    .min_by(|a, b| (*a - k_prev).abs().partial_cmp(&(*b - k_prev).abs()).unwrap())
                {
                    if (k_new - k_prev).abs() <= 0.5 * std::f64::consts::FRAC_PI_2 / p.b {
                        s.push((v, k_new));
                    }
                }
            }
        }
    }
    Ok(series)
}
