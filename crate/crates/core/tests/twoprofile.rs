use std::f64::consts::PI;

use proptest::prelude::*;
use srl::twoprofile::{
    c_constant, phi_of_t, phi_q_functional, theta_average, two_profile_inequality_residual, ThetaTable, TwoProfileInput,
};
use srl::C64;

/// c(q) = (1/2pi) int |1 + e^{i theta}|^q d theta / 2^{q/2}, by a fine trapezoid rule.
fn c_oracle(q: f64) -> f64 {
    let m = 20000;
    let s: f64 = (0..m).map(|k| (2.0 + 2.0 * (2.0 * PI * k as f64 / m as f64).cos()).max(0.0).powf(0.5 * q)).sum();
    s / m as f64 / 2f64.powf(0.5 * q)
}

#[test]
fn c_closed_form() {
    assert!((c_constant(2.0) - 1.0).abs() < 1e-12);
    assert!((c_constant(4.0) - 1.5).abs() < 1e-12);
    assert!((c_constant(6.0) - 2.5).abs() < 1e-12);
    for q in [2.0, 3.0, 10.0 / 3.0, 4.0, 5.5, 6.0] {
        assert!((c_constant(q) / c_oracle(q) - 1.0).abs() < 1e-9, "{q}");
        assert!((phi_of_t(1.0, q).unwrap() - c_constant(q)).abs() < 1e-10, "{q}");
    }
    assert!(phi_of_t(1.5, 4.0).is_err());
}

#[test]
fn theta_average_degenerate_cases() {
    let f = C64::new(0.3, -1.2);
    assert!((theta_average(f, C64::new(0.0, 0.0), 5.0) - f.norm().powf(5.0)).abs() < 1e-12);
    // q = 2: |f|^2 + |g|^2
    let g = C64::new(2.0, 0.5);
    assert!((theta_average(f, g, 2.0) - f.norm_sqr() - g.norm_sqr()).abs() < 1e-12);
}

fn input(seed: &[f64], q: f64) -> TwoProfileInput {
    let m = seed.len() / 5;
    let w = (0..m).map(|i| 0.1 + seed[5 * i].abs()).collect();
    let f = (0..m).map(|i| C64::new(seed[5 * i + 1], seed[5 * i + 2])).collect();
    let g = (0..m).map(|i| C64::new(seed[5 * i + 3], seed[5 * i + 4])).collect();
    TwoProfileInput::new(w, f, g, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inequality_holds(v in prop::collection::vec(-3.0f64..3.0, 5..60), q in 2.0f64..8.0) {
        let inp = input(&v, q);
        let scale = phi_q_functional(&inp).max(1e-300);
        prop_assert!(two_profile_inequality_residual(&inp) / scale >= -1e-8);
    }

    #[test]
    fn phi_symmetries(v in prop::collection::vec(-3.0f64..3.0, 10..40), q in 2.0f64..7.0, lam in 0.2f64..3.0, a in 0.0f64..6.3) {
        let inp = input(&v, q);
        let base = phi_q_functional(&inp);
        let mut swapped = inp.clone();
        std::mem::swap(&mut swapped.f, &mut swapped.g);
        prop_assert!((phi_q_functional(&swapped) / base - 1.0).abs() < 1e-9);
        let mut scaled = inp.clone();
        let u = C64::from_polar(lam, a);
        scaled.f.iter_mut().for_each(|z| *z *= u);
        scaled.g.iter_mut().for_each(|z| *z *= u);
        prop_assert!((phi_q_functional(&scaled) / (base * lam.powf(q)) - 1.0).abs() < 1e-9);
        let mut rotated = inp.clone();
        rotated.g.iter_mut().for_each(|z| *z *= C64::from_polar(1.0, a));
        // exact for the integral; the periodic rule is shift invariant only up to its error
        prop_assert!((phi_q_functional(&rotated) / base - 1.0).abs() < 1e-7);
    }

    #[test]
    fn table_matches_average(re in -2.0f64..2.0, im in -2.0f64..2.0, gr in -2.0f64..2.0, q in 2.0f64..7.0) {
        let t = ThetaTable::new(q);
        let (f, g) = (C64::new(re, im), C64::new(gr, 0.4));
        let a = theta_average(f, g, q);
        prop_assert!((t.eval(f, g) - a).abs() <= 1e-8 * a.max(1e-12));
    }
}
