use std::f64::consts::PI;

use proptest::prelude::*;
use srl::geometry::{Exponent, Lattice, ProfileFunction};
use srl::strichartz::{gaussian_strichartz_constant, propagate, strichartz_quotient, t_of_e, Dispersion};
use srl::C64;

/// (2 pi)^{-(d+2)/d} (2 pi / q)^{d/2} pi / pi^{dq/4}, from the explicit Gaussian flow.
fn gaussian_oracle(d: usize) -> f64 {
    let df = d as f64;
    let q = 2.0 + 4.0 / df;
    (2.0 * PI).powf(-(df + 2.0) / df) * (2.0 * PI / q).powf(0.5 * df) * PI / PI.powf(df * q / 4.0)
}

#[test]
fn gaussian_constants() {
    for d in [1, 2] {
        assert!((gaussian_strichartz_constant(d) / gaussian_oracle(d) - 1.0).abs() < 1e-13);
    }
    assert!((gaussian_strichartz_constant(2) - 1.0 / (8.0 * PI * PI)).abs() < 1e-15);
    assert!((gaussian_strichartz_constant(1) - (2.0 * PI).powi(-3) / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn gaussian_quotient_by_quadrature() {
    for d in [1, 2] {
        let g = ProfileFunction::gaussian(d, 0.25, 32);
        let r = strichartz_quotient(&g, d, &Dispersion::Parabolic).unwrap();
        assert!((r.quotient / gaussian_oracle(d) - 1.0).abs() < 1e-4, "{d}: {}", r.quotient);
        assert!(r.trusted);
    }
}

#[test]
fn propagator_matches_gaussian_flow() {
    let g = ProfileFunction::gaussian(2, 0.25, 40);
    for t in [0.5, 1.5] {
        let u = propagate(&g, t, &Dispersion::Parabolic).unwrap();
        let z = C64::new(1.0, t);
        for idx in [3280usize, 3290, 2470, 2495] {
            let x = u.lattice.point(idx);
            let r2 = x[0] * x[0] + x[1] * x[1];
            let want = (-(r2) / (2.0 * z)).exp() / z;
            assert!((u.values[idx] - want).norm() < 1e-9, "{t} {idx} {} {want}", u.values[idx]);
        }
    }
}

#[test]
fn perturbed_dispersion() {
    for e in [0.0, 1e-9, 0.3, 0.99] {
        assert!((t_of_e(e) - (1.0 - (1.0 - e as f64).sqrt())).abs() < 1e-14);
    }
    // T(E) = E/2 + E^2/8 + ...
    assert!((t_of_e(1e-4) - (5e-5 + 1.25e-9)).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn quotient_invariant_under_symmetries(shift in -2.0f64..2.0, freq in -1.0f64..1.0, amp in 0.1f64..5.0) {
        let d = 1;
        let base = ProfileFunction::from_fn(Lattice::centered(1, 0.125, 160), |x| {
            C64::new((-(x[0] * x[0]) / 2.0).exp() + 0.4 * (-(x[0] - 1.5).powi(2)).exp(), 0.0)
        });
        let moved = ProfileFunction::from_fn(base.lattice.clone(), |x| {
            let y = x[0] - shift;
            C64::from_polar(amp, freq * x[0]) * C64::new((-(y * y) / 2.0).exp() + 0.4 * (-(y - 1.5).powi(2)).exp(), 0.0)
        });
        let a = strichartz_quotient(&base, d, &Dispersion::Parabolic).unwrap().quotient;
        let b = strichartz_quotient(&moved, d, &Dispersion::Parabolic).unwrap().quotient;
        prop_assert!((a / b - 1.0).abs() < 1e-4, "{} {}", a, b);
        prop_assert!(a <= gaussian_strichartz_constant(d) * (1.0 + 1e-6));
        let _ = Exponent::strichartz(d);
    }
}
