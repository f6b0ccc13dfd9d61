//! Acceptance suite: one test per criterion, at the tolerances pinned in
//! `mfes_cli::acceptance`. Each test prints its measured-vs-required line so
//! a full run reads as a checklist.

use mfes_cli::acceptance::{self, CriterionResult};

fn assert_criterion(result: CriterionResult) {
    println!(
        "[{}] {} — {}\n      {}",
        if result.passed { "PASS" } else { "FAIL" },
        result.id,
        result.name,
        result.detail
    );
    assert!(result.passed, "{}: {}", result.id, result.detail);
}

#[test]
fn c1_example1_global_convergence() {
    assert_criterion(acceptance::c1_example1_global_convergence());
}

#[test]
fn c2_local_extremum_escape() {
    assert_criterion(acceptance::c2_local_extremum_escape());
}

#[test]
fn c3_monitoring_bound() {
    assert_criterion(acceptance::c3_monitoring_bound());
}

#[test]
fn c4_frozen_direction_behavior() {
    assert_criterion(acceptance::c4_frozen_direction());
}

#[test]
fn c5_cart_fixed_source_band() {
    assert_criterion(acceptance::c5_cart_fixed());
}

#[test]
fn c6_cart_moving_source_tracking() {
    assert_criterion(acceptance::c6_cart_moving());
}

#[test]
fn c7_time_scaling_consistency() {
    assert_criterion(acceptance::c7_time_scaling_consistency());
}

#[test]
fn c8_norm_observer_bound() {
    assert_criterion(acceptance::c8_norm_observer_bound());
}

#[test]
fn c9_determinism_and_derivative_oracle() {
    assert_criterion(acceptance::c9_determinism_and_oracle());
}
