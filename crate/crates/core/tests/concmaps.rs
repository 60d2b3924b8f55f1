use std::f64::consts::PI;

use proptest::prelude::*;
use srl::concmaps::{b_inverse, b_map, bt_identity_residual, bt_identity_residual_with, random_rotation, BtConfig, zeta, ConcentrationFrame, TDelta};
use srl::geometry::{make_sphere_grid, Lattice, ProfileFunction};
use srl::strichartz::{propagate, Dispersion};
use srl::C64;

fn packet(d: usize, c: f64, k: f64) -> ProfileFunction {
    packet_on(Lattice::centered(d, 0.25, 32), c, k)
}

fn packet_on(lat: Lattice, c: f64, k: f64) -> ProfileFunction {
    let f = ProfileFunction::from_fn(lat, |x| {
        let r2: f64 = x.iter().enumerate().map(|(i, t)| if i == 0 { (t - c).powi(2) } else { t * t }).sum();
        C64::from_polar((-r2 / 1.5).exp(), k * x[0])
    });
    let n = f.norm();
    f.scaled(C64::new(1.0 / n, 0.0))
}

#[test]
fn zeta_limits() {
    assert_eq!(zeta(0.0).unwrap(), (1.0, 1.0));
    let (a, b) = zeta(1.0).unwrap();
    assert!((a - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((b - 2.0 * (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
    // both branches of zeta_2 agree at the switch
    let lo = zeta(0.99999e-4).unwrap().1;
    let hi = zeta(1.00001e-4).unwrap().1;
    assert!((lo - hi).abs() < 1e-12);
    assert!(zeta(-1.0).is_err());
}

#[test]
fn bt_identity_for_distinct_profiles() {
    // delta = 1 needs both a wide profile box (T_delta is box-periodic) and a fine circle
    let lat = Lattice::centered(1, 0.25, 96);
    let p = packet_on(lat.clone(), 0.5, 0.3);
    let m = packet_on(lat, -1.0, -0.6).scaled(C64::new(0.3, 0.7));
    let cfg = BtConfig { sphere_resolution: 256, ..BtConfig::default() };
    for delta in [1.0, 0.5, 0.25] {
        let r = bt_identity_residual_with(&p, &m, delta, &cfg).unwrap();
        assert!(r < 1e-8, "d=1 delta={delta} {r}");
    }
    let p = packet(2, 0.5, 0.3);
    let m = packet(2, -1.0, -0.6).scaled(C64::new(0.3, 0.7));
    for delta in [0.5, 0.25] {
        let r = bt_identity_residual(&p, &m, delta).unwrap();
        assert!(r < 1e-6, "d=2 delta={delta} {r}");
    }
}

#[test]
fn t_delta_at_zero_is_the_free_flow() {
    let psi = packet(1, 0.0, 0.5);
    let t = TDelta::new(&psi, 0.0).unwrap();
    for time in [0.0, -0.7, 1.3] {
        let u = propagate(&psi, time, &Dispersion::Parabolic).unwrap();
        for idx in [20usize, 32, 40, 51] {
            let x = u.lattice.point(idx);
            assert!((t.eval(&[x[0], time]) - u.values[idx]).norm() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn b_map_is_isometric(delta in 0.35f64..0.9, seed in 0u64..1000, c in -1.0f64..1.0) {
        let p = packet(2, c, 0.4);
        let m = packet(2, -c, 0.0).scaled(C64::new(0.0, 0.6));
        let grid = make_sphere_grid(3, 64).unwrap();
        let frame = ConcentrationFrame::identity(3, delta).unwrap().with_rotation(random_rotation(3, seed)).unwrap();
        let f = b_map(&p, &m, &frame, &grid).unwrap();
        let want = 1.0 + 0.36;
        prop_assert!((f.norm().powi(2) - want).abs() < 1e-6, "{}", f.norm().powi(2));
    }

    #[test]
    fn b_inverse_round_trip(c in -0.5f64..0.5, k in -0.5f64..0.5, ar in -1.0f64..1.0, ai in -1.0f64..1.0) {
        let p = packet(2, c, k);
        let m = packet(2, -0.3, 0.2).scaled(C64::new(ar, ai));
        let grid = make_sphere_grid(3, 96).unwrap();
        let frame = ConcentrationFrame::identity(3, 0.5).unwrap();
        let f = b_map(&p, &m, &frame, &grid).unwrap();
        let lat = Lattice::centered(2, 0.25, 24);
        let (bp, bm) = b_inverse(&f, &frame, &lat).unwrap();
        let (mut err, mut tot) = (0.0, 0.0);
        for i in 0..lat.len() {
            let x = lat.point(i);
            let (a, b) = (p.eval_at(&x), m.eval_at(&x));
            err += (bp.values[i] - a).norm_sqr() + (bm.values[i] - b).norm_sqr();
            tot += a.norm_sqr() + b.norm_sqr();
        }
        prop_assert!((err / tot).sqrt() < 2e-3);
    }

    #[test]
    fn rotations_are_orthogonal(seed in 0u64..10_000) {
        for n in [2, 3] {
            let r = random_rotation(n, seed);
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n).map(|k| r[k][i] * r[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((s - want).abs() < 1e-12);
                }
            }
        }
        let _ = PI;
    }
}
