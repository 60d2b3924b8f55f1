use std::f64::consts::PI;

use srl::trial::{antipodal_quotient, antipodal_quotient_direct, gap_certificate, in_expansion_regime, lq_derivative_ratio, scaled_l2, Cutoff, TrialConfig};

#[test]
fn scaled_l2_small_eps() {
    // eps^{-d} ||g_eps||^2 = pi^{d/2} (1 + d(2-d) eps^2 / 16 + O(eps^4))
    for d in [1usize, 2] {
        let e: f64 = 0.01;
        let v = scaled_l2(e, d, &Cutoff::default()).unwrap() / PI.powf(0.5 * d as f64);
        let want = 1.0 + (d * (2 - d)) as f64 * e * e / 16.0;
        assert!((v - want).abs() < 1e-8, "{d}: {v}");
    }
}

#[test]
fn lq_derivative() {
    for (n, want) in [(3, 0.25), (2, 0.4375)] {
        let r = lq_derivative_ratio(n).unwrap();
        assert!((r - want).abs() < 2e-3, "{n}: {r}");
    }
}

#[test]
fn rescaled_and_direct_routes_agree() {
    let c = TrialConfig::default();
    for n in [3, 2] {
        let a = antipodal_quotient(0.3, n, &Cutoff::default(), &c).unwrap().quotient;
        let b = antipodal_quotient_direct(0.3, n, &Cutoff::default(), &c).unwrap().quotient;
        assert!((a / b - 1.0).abs() < 1e-4, "{n}: {a} {b}");
    }
}

#[test]
fn antipodal_pair_beats_threshold() {
    for n in [3, 2] {
        let g = gap_certificate(n, 0.2).unwrap();
        assert!(g.pass && g.margin > 0.0, "{g:?}");
    }
    assert!(gap_certificate(3, 0.5).is_err());
}

#[test]
fn inputs() {
    assert!(Cutoff::new(0.9, 0.5).is_err());
    assert!(in_expansion_regime(0.2));
    assert!(!in_expansion_regime(0.9));
    assert!(scaled_l2(0.0, 1, &Cutoff::default()).is_err());
}
