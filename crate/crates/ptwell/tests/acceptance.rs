//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Thresholds live in `ptwell::validate`.

use ptwell::validate::{self, Check, Level};

fn report(criterion: &str, c: &Check) {
    println!(
        "{} {criterion}: {} — residual {:.3e} (tol {:.1e}); {}",
        if c.passed { "PASS" } else { "FAIL" },
        c.name,
        c.residual,
        c.threshold,
        c.detail
    );
    assert!(c.passed, "{criterion} failed: {} — {}", c.name, c.detail);
}

#[test]
fn criterion_01_oracle_spectral_agreement() {
    report("criterion 1", &validate::check_oracle_spectral_agreement());
}

#[test]
fn criterion_02_no_breaking_at_lambda_zero() {
    report("criterion 2", &validate::check_no_breaking_without_delta());
}

#[test]
fn criterion_03a_ep_existence_and_bound() {
    report("criterion 3a", &validate::check_ep_existence_and_bound());
}

#[test]
fn criterion_03b_ep_oracle_complexification() {
    report("criterion 3b", &validate::check_ep_oracle_complexification());
}

#[test]
fn criterion_04_ep_square_root_scaling() {
    report("criterion 4", &validate::check_ep_sqrt_scaling());
}

#[test]
fn criterion_05a_normalization() {
    report("criterion 5a", &validate::check_normalization_quadrature());
}

#[test]
fn criterion_05b_small_vi_scaling() {
    report("criterion 5b", &validate::check_small_vi_scaling());
}

#[test]
fn criterion_06_generalized_unitarity() {
    report("criterion 6", &validate::check_generalized_unitarity());
}

#[test]
fn criterion_07_reflection_zeros_at_bound_states() {
    report("criterion 7", &validate::check_reflection_zeros());
}

#[test]
fn criterion_08_transfer_matrix_identities() {
    report("criterion 8", &validate::check_transfer_identities());
}

#[test]
fn criterion_09_bound_state_transport() {
    report("criterion 9", &validate::check_transport_stationarity());
}

#[test]
fn criterion_10_scattering_flux_conservation() {
    report("criterion 10", &validate::check_scattering_flux_conservation());
}

#[test]
fn criterion_11_flux_monotonicity() {
    report("criterion 11", &validate::check_monotonicity());
}

#[test]
fn criterion_12_full_validation_runtime() {
    let t0 = std::time::Instant::now();
    let checks = validate::run(Level::Full);
    let dt = t0.elapsed().as_secs_f64();
    let failures: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let passed = failures.is_empty() && dt <= 600.0;
    println!(
        "{} criterion 12: full validation — {} checks in {dt:.1} s (budget 600 s), {} failures",
        if passed { "PASS" } else { "FAIL" },
        checks.len(),
        failures.len()
    );
    for f in &failures {
        println!("       failed: {} — {}", f.name, f.detail);
    }
    assert!(passed, "full validation failed or exceeded the runtime budget");
}
