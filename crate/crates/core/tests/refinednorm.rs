use std::collections::HashMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use srl::geometry::{make_sphere_grid, Lattice, ProfileFunction, SphereFunction};
use srl::numerics::smooth_ramp;
use srl::refinednorm::{
    bilinear_ratio, cap_profile_identity_residual, dyadic_sum_ratio, q_star, random_band_limited, refined_norm,
    refined_norm_bound, rotation_to, BilinearConfig, CapAtlas, CapIdentityConfig, DyadicCube, RefinedNormConfig,
};
use srl::search::random_smooth;
use srl::strichartz::Dispersion;
use srl::C64;

/// sup over caps, cubes and the x lattice, with no pruning and direct phase evaluation.
fn brute_force(f: &SphereFunction, atlas: &CapAtlas, cfg: &RefinedNormConfig) -> f64 {
    let n = atlas.dim();
    let g = &atlas.grid;
    let m = (cfg.x_half / cfg.x_step).floor() as i64;
    let mut xs = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            for k in if n == 3 { -m..=m } else { 0..=0 } {
                let x = [i as f64 * cfg.x_step, j as f64 * cfg.x_step, k as f64 * cfg.x_step];
                if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() <= cfg.x_half {
                    xs.push(x);
                }
            }
        }
    }
    let mut best: f64 = 0.0;
    for alpha in 0..atlas.len() {
        for level in cfg.j_min..=cfg.j_max {
            let side = 2f64.powi(level);
            let mut cubes: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
            for (j, w) in g.nodes.iter().enumerate() {
                let (xi, h) = atlas.local(alpha, w);
                if h > 0.0 && atlas.weights[alpha][j] > 0.0 {
                    cubes.entry(xi.iter().map(|t| (t / side).floor() as i64).collect()).or_default().push(j);
                }
            }
            for nodes in cubes.values() {
                for x in &xs {
                    let mut s = C64::new(0.0, 0.0);
                    for &j in nodes {
                        let w = g.nodes[j];
                        let ph = x[0] * w[0] + x[1] * w[1] + x[2] * w[2];
                        s += f.values[j] * atlas.weights[alpha][j] * g.weights[j] * C64::new(ph.cos(), ph.sin());
                    }
                    let v = (2.0 * PI).powf(-0.5 * n as f64) * s.norm() / side.powf(0.5 * (n - 1) as f64);
                    best = best.max(v);
                }
            }
        }
    }
    best
}

fn setup(n: usize) -> (CapAtlas, RefinedNormConfig) {
    let g = make_sphere_grid(n, if n == 3 { 24 } else { 128 }).unwrap();
    let atlas = CapAtlas::new(&g, 0.3).unwrap();
    let cfg = RefinedNormConfig::for_atlas(&atlas);
    (atlas, cfg)
}

#[test]
fn matches_brute_force() {
    for n in [3, 2] {
        let (atlas, mut cfg) = setup(n);
        cfg.x_half = if n == 3 { 3.0 } else { 12.0 };
        cfg.x_step = PI / 8.0;
        for f in [SphereFunction::constant(&atlas.grid, 1.0), random_smooth(&atlas.grid, 11, 3.0)] {
            let fast = refined_norm(&f, &atlas, &cfg).unwrap();
            let slow = brute_force(&f, &atlas, &cfg);
            assert!((fast.value / slow - 1.0).abs() < 1e-12, "N={n} {} {slow}", fast.value);
            assert!(fast.upper >= fast.value);
        }
    }
}

#[test]
fn atlas_is_a_partition() {
    for n in [3, 2] {
        let (atlas, _) = setup(n);
        assert!(atlas.partition_defect() < 1e-12);
        assert_eq!(atlas.leakage(), 0.0);
    }
}

#[test]
fn rotation_covariance() {
    // a quarter turn maps circle nodes to nodes and the x lattice to itself
    let (atlas, cfg) = setup(2);
    let r = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    let f = random_smooth(&atlas.grid, 5, 3.0);
    let len = f.values.len();
    let mut moved = f.clone();
    for k in 0..len {
        moved.values[(k + len / 4) % len] = f.values[k];
    }
    let a = refined_norm(&f, &atlas, &cfg).unwrap().value;
    let b = refined_norm(&moved, &atlas.rotated(&r).unwrap(), &cfg).unwrap().value;
    assert!((a / b - 1.0).abs() < 1e-12, "{a} {b}");
}

#[test]
fn rotations_reach_their_target() {
    for theta in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.6, 0.0, 0.8], [0.36, -0.48, 0.8]] {
        let r = rotation_to(&theta, 3).unwrap();
        for i in 0..3 {
            assert!((r[i][2] - theta[i]).abs() < 1e-12);
        }
    }
    let r = rotation_to(&[0.6, 0.8, 0.0], 2).unwrap();
    assert!((r[0][1] - 0.6).abs() < 1e-12 && (r[1][1] - 0.8).abs() < 1e-12);
}

#[test]
fn cap_identity_rotated() {
    let mut cfg = CapIdentityConfig::new(2);
    cfg.rotation = Some(rotation_to(&[0.28, 0.96, 0.0], 2).unwrap());
    let bump = |w: &[f64]| {
        if w[1] <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::new(1.0 - w[0], 0.5) * smooth_ramp((0.29 - w[0].abs()) / 0.2)
    };
    let r = cap_profile_identity_residual(&bump, &cfg).unwrap();
    assert!(r < 1e-6, "{r}");
    // support outside the cap is rejected
    let wide = |_: &[f64]| C64::new(1.0, 0.0);
    assert!(cap_profile_identity_residual(&wide, &cfg).is_err());
}

#[test]
fn q_star_values() {
    assert_eq!(q_star(4.0).unwrap(), 2.0);
    assert_eq!(q_star(6.0).unwrap(), 1.5);
    assert!((q_star(10.0 / 3.0).unwrap() - 5.0 / 3.0).abs() < 1e-15);
    assert!(q_star(2.0).is_err());
}

#[test]
fn dyadic_sum_by_hand() {
    // f = 1 on [0, 1): the level-0 cube gives 1, the two level -1 cubes give 2 * sqrt(2) / 4
    let f = ProfileFunction::from_fn(Lattice::centered(1, 0.125, 64), |x| {
        C64::new(if x[0] >= 0.0 && x[0] < 1.0 { 1.0 } else { 0.0 }, 0.0)
    });
    let r = dyadic_sum_ratio(&f, 4.0 / 3.0, 2.0, -1, 0).unwrap();
    assert!((r - (1.0 + 0.5f64.sqrt()).sqrt()).abs() < 1e-12, "{r}");
    assert!(dyadic_sum_ratio(&f, 4.0 / 3.0, 2.0, -3, 0).is_err());
    assert!(dyadic_sum_ratio(&f, 2.0, 1.5, 0, 1).is_err());
}

#[test]
fn bilinear_preconditions() {
    let psi = random_band_limited(1, 0.9, 4, 2).unwrap();
    let cfg = BilinearConfig::new(0.9, Dispersion::Parabolic);
    let q = DyadicCube::new(-3, vec![0]);
    let far = DyadicCube::new(-3, vec![2]);
    assert!(bilinear_ratio(&psi, &q, &far, 2.5, &cfg).is_ok());
    assert!(bilinear_ratio(&psi, &q, &DyadicCube::new(-3, vec![1]), 2.5, &cfg).is_err());
    assert!(bilinear_ratio(&psi, &q, &far, 1.9, &cfg).is_err());
    assert!(bilinear_ratio(&psi, &DyadicCube::new(0, vec![0]), &DyadicCube::new(0, vec![2]), 2.5, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn upper_bound_chain(seed in 0u64..100_000, kappa in 1.0f64..8.0) {
        let (atlas, cfg) = setup(2);
        let f = random_smooth(&atlas.grid, seed, kappa);
        let r = refined_norm(&f, &atlas, &cfg).unwrap();
        prop_assert!(r.value <= r.upper);
        prop_assert!(r.value <= refined_norm_bound(&atlas, &cfg) * f.norm());
    }

    #[test]
    fn modulation_invariance(seed in 0u64..100_000, i in -3i64..3, j in -3i64..3) {
        let (atlas, cfg) = setup(2);
        let f = random_smooth(&atlas.grid, seed, 3.0);
        let a = [i as f64 * cfg.x_step, j as f64 * cfg.x_step];
        let v0 = refined_norm(&f, &atlas, &cfg).unwrap();
        let v1 = refined_norm(&f.modulated(&a), &atlas, &cfg).unwrap();
        // exact unless the maximiser sits within |a| of the edge of the x window
        let x = &v0.x_argmax;
        if x[0].hypot(x[1]) + a[0].hypot(a[1]) < cfg.x_half {
            prop_assert!(v1.value >= v0.value * (1.0 - 1e-12));
        }
    }

    #[test]
    fn dyadic_cubes(x in -50.0f64..50.0, y in -50.0f64..50.0, level in -6i32..4) {
        let q = DyadicCube::containing(level, &[x, y]);
        prop_assert!(q.contains(&[x, y]));
        prop_assert!(q.parent().contains(&[x, y]));
        prop_assert!((q.volume() - q.side() * q.side()).abs() < 1e-15 * q.volume());
        prop_assert!(!q.related(&q));
        let far = DyadicCube::new(level, vec![q.corner[0] + 2, q.corner[1]]);
        prop_assert_eq!(q.related(&far), q.parent().adjacent(&far.parent()));
    }
}
