use std::f64::consts::PI;

use proptest::prelude::*;
use srl::geometry::{harmonic_basis, inner_product, make_sphere_grid, Exponent, Lattice, ProfileFunction, SphereFunction};
use srl::C64;

#[test]
fn nodes_are_unit_and_weights_sum_to_area() {
    for (n, res, area) in [(2, 64, 2.0 * PI), (3, 24, 4.0 * PI)] {
        let g = make_sphere_grid(n, res).unwrap();
        for p in &g.nodes {
            let r: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
        let s: f64 = g.weights.iter().sum();
        assert!((s - area).abs() < 1e-12 * area, "{n}: {s}");
    }
}

#[test]
fn rejects_bad_grids() {
    assert!(make_sphere_grid(4, 24).is_err());
    assert!(make_sphere_grid(3, 2).is_err());
}

#[test]
fn monomials_integrate_exactly() {
    // int_{S^2} z^2 = 4 pi / 3, int_{S^2} x^2 y^2 = 4 pi / 15
    let g = make_sphere_grid(3, 16).unwrap();
    let z2: f64 = g.nodes.iter().zip(&g.weights).map(|(p, w)| w * p[2] * p[2]).sum();
    let x2y2: f64 = g.nodes.iter().zip(&g.weights).map(|(p, w)| w * p[0] * p[0] * p[1] * p[1]).sum();
    assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!((x2y2 - 4.0 * PI / 15.0).abs() < 1e-12);
}

#[test]
fn harmonics_are_orthonormal() {
    for (n, res, l) in [(2, 64, 6), (3, 20, 5)] {
        let g = make_sphere_grid(n, res).unwrap();
        let b = harmonic_basis(&g, l).unwrap();
        let expected = if n == 2 { 2 * l + 1 } else { (l + 1) * (l + 1) };
        assert_eq!(b.len(), expected);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let ip = inner_product(&b[i], &b[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-11, "{n} {i} {j} {ip}");
            }
        }
    }
}

#[test]
fn exponents() {
    assert_eq!(Exponent::stein_tomas(3).value(), 4.0);
    assert_eq!(Exponent::stein_tomas(2).value(), 6.0);
    assert_eq!(Exponent::strichartz(1).value(), 6.0);
    assert!((Exponent::strichartz(2).value() - 4.0).abs() < 1e-15);
}

fn smooth(g: &std::sync::Arc<srl::geometry::SphereGrid>, a: f64, b: f64) -> SphereFunction {
    SphereFunction::from_fn(g, |w| C64::new((a * w[0]).exp() * (1.0 + w[1] * w[1]), b * w[w.len() - 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_limit_is_a_projection(a in -1.0f64..1.0, b in -2.0f64..2.0, l in 1usize..6) {
        let g = make_sphere_grid(3, 16).unwrap();
        let f = smooth(&g, a, b);
        let p = f.band_limited(l).unwrap();
        let pp = p.band_limited(l).unwrap();
        let d: f64 = p.values.iter().zip(&pp.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-11);
        prop_assert!(p.norm() <= f.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn modulation_is_unitary(a0 in -5.0f64..5.0, a1 in -5.0f64..5.0, a2 in -5.0f64..5.0) {
        let g = make_sphere_grid(3, 12).unwrap();
        let f = smooth(&g, 0.5, 1.0);
        let m = f.modulated(&[a0, a1, a2]);
        prop_assert!((m.norm() - f.norm()).abs() < 1e-12 * f.norm());
        let back = m.modulated(&[-a0, -a1, -a2]);
        let d: f64 = back.values.iter().zip(&f.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn dft_preserves_norm(c in -3.0f64..3.0, s in 0.5f64..2.0) {
        let f = ProfileFunction::from_fn(Lattice::centered(2, 0.25, 24), |x| {
            let r2 = (x[0] - c).powi(2) + x[1] * x[1];
            C64::from_polar((-r2 / (s * s)).exp(), 0.7 * x[0])
        });
        let spec = f.dft();
        let back = spec.inverse();
        let d: f64 = back.values.iter().zip(&f.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
        let e: f64 = spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * spec.cell();
        prop_assert!((e.sqrt() / f.norm() - 1.0).abs() < 1e-10);
    }
}
