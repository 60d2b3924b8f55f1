use std::f64::consts::PI;

use proptest::prelude::*;
use srl::geometry::SphereFunction;
use srl::search::{
    ascend_with, default_degree, funk_hecke, gauge_fix, random_smooth, AscentOptions, BandOperator, SearchConfig,
};
use srl::trial::{f_eps, Cutoff};
use srl::C64;

fn operator(n: usize) -> (SearchConfig, BandOperator) {
    let cfg = SearchConfig::for_dimension(n).unwrap();
    let g = cfg.sphere().unwrap();
    let s = cfg.space().unwrap();
    let op = BandOperator::new(&g, &s, default_degree(&g, &s)).unwrap();
    (cfg, op)
}

#[test]
fn funk_hecke_degree_zero() {
    for r in [0.0, 0.4, 3.0, 17.5] {
        let s = if r == 0.0 { 1.0 } else { f64::sin(r) / r };
        let want = (2.0 * PI).powf(-1.5) * 4.0 * PI * s;
        assert!((funk_hecke(3, 0, r) - C64::new(want, 0.0)).norm() < 1e-13);
        // (1/2pi) int e^{ir cos t} dt = J0(r), against a series
        let mut j0 = 0.0;
        let mut term = 1.0;
        for k in 0..60 {
            if k > 0 {
                term *= -(r * r / 4.0) / (k * k) as f64;
            }
            j0 += term;
        }
        assert!((funk_hecke(2, 0, r) - C64::new(j0, 0.0)).norm() < 1e-10, "{r}");
    }
}

#[test]
fn constant_is_a_fixed_point() {
    let (cfg, op) = operator(3);
    let f = SphereFunction::constant(&cfg.sphere().unwrap(), 1.0);
    let t = ascend_with(&op, &f, 50, &AscentOptions::default()).unwrap();
    assert!(t.converged);
    assert!(t.el_residual < 1e-5);
    assert_eq!(t.guard_trips, 0);
    assert!((t.final_quotient() * 4.0 * PI * PI - 1.0).abs() < 1e-4, "{}", t.final_quotient());
}

#[test]
fn gauge_fix_recovers_modulation() {
    let cfg = SearchConfig::for_dimension(3).unwrap();
    let g = cfg.sphere().unwrap();
    let one = SphereFunction::constant(&g, 1.0);
    let b = [0.7, -0.4, 0.3];
    let (fixed, a) = gauge_fix(&one.modulated(&b));
    for i in 0..3 {
        assert!((a[i] + b[i]).abs() < 1e-6, "{a:?}");
    }
    let d = fixed.values.iter().map(|v| (v - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    assert!(d < 1e-5);
    let (_, again) = gauge_fix(&fixed);
    assert!(again.iter().all(|v| v.abs() < 1e-6), "{again:?}");
}

#[test]
fn antipodal_start_escapes_to_the_constant() {
    let (cfg, op) = operator(3);
    let g = cfg.sphere().unwrap();
    let f0 = f_eps(0.2, &g, &Cutoff::default()).unwrap();
    let t = ascend_with(&op, &f0, 400, &AscentOptions::default()).unwrap();
    assert_eq!(t.guard_trips, 0);
    assert!(t.final_quotient() * 4.0 * PI * PI > 0.999, "{}", t.final_quotient());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn traces_are_monotone(seed in 0u64..10_000, n in 2usize..4) {
        let (cfg, op) = operator(n);
        let f0 = random_smooth(&cfg.sphere().unwrap(), seed, cfg.kappa);
        let t = ascend_with(&op, &f0, 400, &AscentOptions::default()).unwrap();
        for w in t.truncated.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        prop_assert_eq!(t.guard_trips, 0);
        prop_assert!(t.el_residual <= 1e-5);
    }
}
