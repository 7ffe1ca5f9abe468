//! Randomized theorem suites at their gate counts. These are hard gates:
//! the underlying statements are proved facts, so any failure is an
//! implementation bug, not noise.

use gmelab_core::verify::{
    suite_ccm, suite_equality, suite_gk, suite_kset, suite_pushforward, suite_sandwich,
};

#[test]
fn kset_certificate_on_50_random_instances() {
    let report = suite_kset(50, 2024).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.count, 50);
}

#[test]
fn encoder_cost_equality_on_30_random_instances() {
    let report = suite_equality(30, 2025).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.worst <= 1e-9, "worst delta {}", report.worst);
}

#[test]
fn pushforward_factorization_on_30_random_instances() {
    let report = suite_pushforward(30, 2026).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.worst <= 1e-9, "worst delta {}", report.worst);
}

#[test]
fn sandwich_bound_on_30_random_instances() {
    let report = suite_sandwich(30, 2027).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn optimal_assignments_are_ccm_on_30_random_instances() {
    let report = suite_ccm(30, 2028).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn sawtooth_pushforward_gates() {
    let report = suite_gk().unwrap();
    assert!(report.pass, "{report:?}");
}
