//! Acceptance suite: one test per criterion, each printing its one-line
//! verdict. Criterion bodies and tolerances live in the library's
//! `acceptance` module so that the CLI `verify` command runs exactly the
//! same checks.

use horocount::acceptance::run_criterion;

fn check(id: &str) {
    let start = std::time::Instant::now();
    let report = run_criterion(id).expect("criterion infrastructure");
    println!("{} [{:.1}s]", report.line(), start.elapsed().as_secs_f64());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn a1_orbit_matches_closed_form_family() {
    check("A1");
}

#[test]
fn a2_global_counts_grow_at_boundary_dimension() {
    check("A2");
}

#[test]
fn a3_local_counts_stay_in_one_band() {
    check("A3");
}

#[test]
fn a4_proximity_dichotomy_on_random_queries() {
    check("A4");
}

#[test]
fn a5_intermediate_counts_stay_in_one_band() {
    check("A5");
}

#[test]
fn a6_masses_match_global_formula() {
    check("A6");
}

#[test]
fn a7_mass_ratios_continuous_off_atoms() {
    check("A7");
}

#[test]
fn a8_dimension_estimators_hit_documented_values() {
    check("A8");
}

#[test]
fn a9_image_law_and_depth_match_oracles() {
    check("A9");
}
