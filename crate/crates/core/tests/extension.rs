use std::f64::consts::PI;

use proptest::prelude::*;
use srl::extension::{extend, extend_on_space, stein_tomas_quotient};
use srl::geometry::{harmonic_basis, make_sphere_grid, SphereFunction};
use srl::search::{funk_hecke, BandOperator, SearchConfig};
use srl::C64;

/// J0 by the trapezoid rule on the periodic integrand, independent of the library's Bessel code.
fn j0(r: f64) -> f64 {
    let m = 400;
    (0..m).map(|k| (r * (2.0 * PI * k as f64 / m as f64).cos()).cos()).sum::<f64>() / m as f64
}

fn constant_check(n: usize, r: f64) -> f64 {
    if n == 3 {
        let s = if r < 1e-8 { 1.0 } else { r.sin() / r };
        (2.0 * PI).powf(-1.5) * 4.0 * PI * s
    } else {
        j0(r)
    }
}

#[test]
fn stein_tomas_constant_function() {
    let cfg = SearchConfig::for_dimension(3).unwrap();
    let f = SphereFunction::constant(&cfg.sphere().unwrap(), 1.0);
    let r = stein_tomas_quotient(&f, &cfg.space().unwrap()).unwrap();
    assert!((r.quotient * 4.0 * PI * PI - 1.0).abs() < 1e-3, "{}", r.quotient);
    assert!(r.trusted);
}

#[test]
fn funk_hecke_matches_direct_extension() {
    for (n, res, l) in [(3, 24, 4), (2, 96, 5)] {
        let g = make_sphere_grid(n, res).unwrap();
        let basis = harmonic_basis(&g, l).unwrap();
        let hs = srl::geometry::harmonics_at(n, l, &[[0.6, 0.0, 0.8], [0.0, 1.0, 0.0], [-0.28, 0.96, 0.0]]).unwrap();
        for (k, (deg, _, vals)) in hs.iter().enumerate() {
            for (p, y) in [[0.6, 0.0, 0.8], [0.0, 1.0, 0.0], [-0.28, 0.96, 0.0]].iter().zip(vals) {
                if n == 2 && p[2] != 0.0 {
                    continue;
                }
                let r = 3.7;
                let x: Vec<f64> = p[..n].iter().map(|v| v * r).collect();
                let direct = extend(&basis[k], &x);
                let fh = funk_hecke(n, *deg, r) * y;
                assert!((direct - fh).norm() < 1e-10, "N={n} k={k} {direct} {fh}");
            }
        }
    }
}

#[test]
fn band_operator_field_matches_extension() {
    let mut cfg = SearchConfig::for_dimension(3).unwrap();
    cfg.radial_nodes = 120;
    cfg.r_max = 15.0;
    let g = cfg.sphere().unwrap();
    let space = cfg.space().unwrap();
    let op = BandOperator::new(&g, &space, 4).unwrap();
    let f = SphereFunction::from_fn(&g, |w| C64::new(1.0 + w[0] * w[1], w[2] * w[2] - 0.3 * w[0]));
    let c = op.coefficients(&f).unwrap();
    let fb = op.function(&c);
    let a = op.field(&c);
    let b = extend_on_space(&fb, &space);
    let d = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(d < 1e-10, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constant_matches_closed_form(x0 in -20.0f64..20.0, x1 in -20.0f64..20.0, x2 in -20.0f64..20.0) {
        let g3 = make_sphere_grid(3, 48).unwrap();
        let v = extend(&SphereFunction::constant(&g3, 1.0), &[x0, x1, x2]);
        let r = (x0 * x0 + x1 * x1 + x2 * x2).sqrt();
        prop_assert!((v - C64::new(constant_check(3, r), 0.0)).norm() < 1e-10);
        let g2 = make_sphere_grid(2, 128).unwrap();
        let v = extend(&SphereFunction::constant(&g2, 1.0), &[x0, x1]);
        prop_assert!((v - C64::new(constant_check(2, x0.hypot(x1)), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn modulation_translates(a0 in -3.0f64..3.0, a1 in -3.0f64..3.0, x0 in -5.0f64..5.0, x1 in -5.0f64..5.0) {
        let g = make_sphere_grid(3, 24).unwrap();
        let f = SphereFunction::from_fn(&g, |w| C64::new(1.0 + w[0], w[1] * w[2]));
        let a = [a0, a1, 0.5];
        let x = [x0, x1, -1.0];
        let lhs = extend(&f.modulated(&a), &x);
        let rhs = extend(&f, &[x0 + a0, x1 + a1, -0.5]);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
