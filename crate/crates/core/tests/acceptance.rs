//! One PASS/FAIL line per acceptance criterion, computed from a single default `verify` run.

use srl::cli::{run, RunConfig};

const CRITERIA: [(&str, &[&str]); 11] = [
    ("constants c(4), c(6), c(2)", &["c(4)", "c(6)", "c(2)"]),
    ("Gaussian Strichartz closed form vs space-time quadrature", &["S_2^G", "S_1^G", "gaussian_quotient_d1", "gaussian_quotient_d2"]),
    ("Stein-Tomas constant function on S^2", &["stein_tomas_constant_S2"]),
    ("gap at N=3 and N=2", &["gap_ratio_N3", "gap_margin_N2"]),
    (
        "expansion slopes and intercepts",
        &[
            "single_slope_N3",
            "single_intercept_N3",
            "antipodal_slope_N3",
            "antipodal_intercept_N3",
            "single_slope_N2",
            "single_intercept_N2",
            "antipodal_slope_N2",
            "antipodal_intercept_N2",
        ],
    ),
    ("L^2 expansion coefficient", &["l2_coefficient_N3", "l2_coefficient_N2"]),
    (
        "exact identity residuals",
        &["bt_identity", "cap_identity_N3", "cap_identity_N2", "b_map_norm", "t_delta_zero_vs_propagator"],
    ),
    (
        "two-profile inequality",
        &["two_profile_min_residual", "two_profile_equality_residual", "gaussian_pair_tilde_d1", "gaussian_pair_tilde_d2"],
    ),
    (
        "ascent properties",
        &["el_residual_max_N3", "el_residual_max_N2", "guard_trips_N3", "guard_trips_N2", "multistart_worst_over_benchmark_N3"],
    ),
    ("appendix bands and q_star", &["bilinear_band", "dyadic_sum_band", "q_star(4)", "q_star(6)", "q_star(10/3)"]),
    ("refined norm invariances", &["refined_modulation_N3", "refined_modulation_N2", "refined_chain_N3", "refined_chain_N2"]),
];

#[test]
fn acceptance() {
    let report = run("verify", &RunConfig::default()).expect("verify runs");
    let mut failed = Vec::new();
    for (k, (title, rows)) in CRITERIA.iter().enumerate() {
        let mut ok = true;
        let mut detail = Vec::new();
        for name in rows.iter() {
            match report.find(name) {
                Some(c) => {
                    ok &= c.pass;
                    detail.push(format!("{}={:.6e} (expected {:.6e}, {:?} tol {:e})", c.name, c.value, c.expected, c.compare, c.tolerance));
                }
                None => {
                    ok = false;
                    detail.push(format!("{name} missing"));
                }
            }
        }
        println!("criterion {:>2} {}: {}", k + 1, if ok { "PASS" } else { "FAIL" }, title);
        for d in detail {
            println!("      {d}");
        }
        if !ok {
            failed.push(k + 1);
        }
    }
    println!("report trusted: {}", report.trusted);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(report.trusted);
}
