//! The two-profile functional, the auxiliary function phi(t) and the constant c(q).

use crate::error::{Result, SrlError};
use crate::geometry::{abs_pow, Exponent, ProfileFunction, SpaceGrid};
use crate::numerics::{gauss_legendre_on, ln_gamma, pairwise_sum, C64};
use crate::strichartz::{parabolic_energy, strichartz_prefactor, SpaceTimeConfig};
use rayon::prelude::*;
use std::f64::consts::PI;

pub const THETA_NODES: usize = 256;

/// phi(t) = (1/pi) int_0^pi (1 + t cos theta)^{q/2} d theta.
pub fn phi_of_t(t: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || q < 2.0 {
        return Err(SrlError::Domain(format!("phi_of_t needs t in [0,1], q >= 2 (t={t}, q={q})")));
    }
    let (th, w) = gauss_legendre_on(128, 0.0, PI);
    let v: Vec<f64> = th.iter().zip(&w).map(|(a, wi)| wi * (1.0 + t * a.cos()).max(0.0).powf(0.5 * q)).collect();
    Ok(pairwise_sum(&v) / PI)
}

/// c(q) = 2^{q/2} Gamma((q+1)/2) / (sqrt(pi) Gamma((q+2)/2)).
pub fn c_constant(q: f64) -> f64 {
    (0.5 * q * 2f64.ln() + ln_gamma(0.5 * (q + 1.0)) - ln_gamma(0.5 * (q + 2.0))).exp() / PI.sqrt()
}

/// (1/2pi) int |f + e^{i theta} g|^q d theta by the periodic trapezoid rule.
pub fn theta_average(f: C64, g: C64, q: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..THETA_NODES {
        let th = 2.0 * PI * k as f64 / THETA_NODES as f64;
        s += abs_pow(f + g * C64::from_polar(1.0, th), q);
    }
    s / THETA_NODES as f64
}

/// Tabulated theta average: (|f|^2+|g|^2)^{q/2} phi(2|f||g|/(|f|^2+|g|^2)), phi built
/// from the same trapezoid rule and interpolated with cubic Lagrange pieces.
pub struct ThetaTable {
    q: f64,
    values: Vec<f64>,
}

impl ThetaTable {
    const N: usize = 2048;

    pub fn new(q: f64) -> Self {
        let values = (0..=Self::N + 2)
            .map(|i| {
                let t = (i as f64 / Self::N as f64).min(1.0);
                theta_average(C64::new(1.0, 0.0), C64::new(t, 0.0), q) / (1.0 + t * t).powf(0.5 * q)
            })
            .collect::<Vec<_>>();
        // values[i] = phi(2s/(1+s^2)) indexed by s = |g|/|f| in [0,1]
        ThetaTable { q, values }
    }

    pub fn eval(&self, f: C64, g: C64) -> f64 {
        let (a, b) = (f.norm(), g.norm());
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == 0.0 {
            return 0.0;
        }
        let s = small / big;
        let x = s * Self::N as f64;
        let i = (x.floor() as usize).clamp(1, Self::N - 1);
        let u = x - i as f64;
        let p = &self.values[i - 1..i + 3];
        // cubic Lagrange on nodes -1, 0, 1, 2
        let l = [
            -u * (u - 1.0) * (u - 2.0) / 6.0,
            (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
            -(u + 1.0) * u * (u - 2.0) / 2.0,
            (u + 1.0) * u * (u - 1.0) / 6.0,
        ];
        let phi = l[0] * p[0] + l[1] * p[1] + l[2] * p[2] + l[3] * p[3];
        (a * a + b * b).powf(0.5 * self.q) * phi
    }
}

/// A pair of fields sampled on a shared set of weighted nodes.
#[derive(Clone, Debug)]
pub struct TwoProfileInput {
    pub weights: Vec<f64>,
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub q: f64,
    /// Last coordinate of every node, needed only by the lambda probe.
    pub last_coord: Option<Vec<f64>>,
}

impl TwoProfileInput {
    pub fn new(weights: Vec<f64>, f: Vec<C64>, g: Vec<C64>, q: f64) -> Result<Self> {
        if f.len() != weights.len() || g.len() != weights.len() {
            return Err(SrlError::GridMismatch);
        }
        if q < 2.0 {
            return Err(SrlError::Domain("q must be >= 2".into()));
        }
        Ok(TwoProfileInput { weights, f, g, q, last_coord: None })
    }

    /// Fields sampled on every point of a space grid (truncated; no tail).
    pub fn on_space(space: &SpaceGrid, f: impl Fn(&[f64]) -> C64, g: impl Fn(&[f64]) -> C64, q: f64) -> Result<Self> {
        let n = space.num_points();
        let pts: Vec<[f64; 3]> = (0..n).map(|i| space.point(i)).collect();
        let dim = space.dim;
        let mut inp = Self::new(
            (0..n).map(|i| space.weight(i)).collect(),
            pts.iter().map(|p| f(&p[..dim])).collect(),
            pts.iter().map(|p| g(&p[..dim])).collect(),
            q,
        )?;
        inp.last_coord = Some(pts.iter().map(|p| p[dim - 1]).collect());
        Ok(inp)
    }

    pub fn lq_q(&self, which: usize) -> f64 {
        let v = if which == 0 { &self.f } else { &self.g };
        let t: Vec<f64> = v.iter().zip(&self.weights).map(|(z, w)| w * abs_pow(*z, self.q)).collect();
        pairwise_sum(&t)
    }
}

/// Phi_q(f, g) through the theta-average identity.
pub fn phi_q_functional(input: &TwoProfileInput) -> f64 {
    let v: Vec<f64> = (0..input.weights.len())
        .into_par_iter()
        .map(|i| input.weights[i] * theta_average(input.f[i], input.g[i], input.q))
        .collect();
    pairwise_sum(&v)
}

/// int |f + e^{i lambda x_N} g|^q at finite lambda (demonstration only).
pub fn lambda_probe(input: &TwoProfileInput, lambda: f64) -> Result<f64> {
    let xn = input.last_coord.as_ref().ok_or_else(|| SrlError::Domain("lambda probe needs node coordinates".into()))?;
    let v: Vec<f64> = (0..input.weights.len())
        .map(|i| input.weights[i] * abs_pow(input.f[i] + input.g[i] * C64::from_polar(1.0, lambda * xn[i]), input.q))
        .collect();
    Ok(pairwise_sum(&v))
}

/// c(q) (||f||_q^2 + ||g||_q^2)^{q/2} - Phi_q(f, g).
pub fn two_profile_inequality_residual(input: &TwoProfileInput) -> f64 {
    let q = input.q;
    let nf = input.lq_q(0).powf(2.0 / q);
    let ng = input.lq_q(1).powf(2.0 / q);
    c_constant(q) * (nf + ng).powf(0.5 * q) - phi_q_functional(input)
}

/// (2pi)^{-(d+2)/d} Phi_q(e^{it Delta/2} psi+, e^{-it Delta/2} psi-) / (||psi+||^2 + ||psi-||^2)^{q/2}.
pub fn tilde_strichartz_quotient(psi_plus: &ProfileFunction, psi_minus: &ProfileFunction, d: usize) -> Result<f64> {
    tilde_strichartz_quotient_with(psi_plus, psi_minus, d, &SpaceTimeConfig::default())
}

pub fn tilde_strichartz_quotient_with(
    psi_plus: &ProfileFunction,
    psi_minus: &ProfileFunction,
    d: usize,
    cfg: &SpaceTimeConfig,
) -> Result<f64> {
    if psi_plus.dim() != d || psi_minus.dim() != d {
        return Err(SrlError::UnsupportedDimension(d));
    }
    let n2 = psi_plus.norm().powi(2) + psi_minus.norm().powi(2);
    if n2 == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    let q = Exponent::strichartz(d).value();
    let table = ThetaTable::new(q);
    let (energy, _) = parabolic_energy(&[(psi_plus, 1.0), (psi_minus, -1.0)], q, &|v: &[C64]| table.eval(v[0], v[1]), cfg)?;
    Ok(strichartz_prefactor(d) * energy / n2.powf(0.5 * q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert!((phi_of_t(0.0, 5.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((phi_of_t(1.0, 4.0).unwrap() - 1.5).abs() < 1e-10);
        assert!((phi_of_t(1.0, 6.0).unwrap() - 2.5).abs() < 1e-10);
        for &q in &[2.0, 8.0 / 3.0, 10.0 / 3.0, 4.0, 6.0] {
            assert!((c_constant(q) - phi_of_t(1.0, q).unwrap()).abs() < 1e-10, "{q}");
        }
    }

    #[test]
    fn table_matches_direct() {
        for &q in &[4.0, 10.0 / 3.0, 6.0] {
            let t = ThetaTable::new(q);
            for k in 0..50 {
                let f = C64::from_polar(1.0 + 0.1 * k as f64, 0.3 * k as f64);
                let g = C64::from_polar(0.05 * k as f64, -0.7 * k as f64);
                let a = t.eval(f, g);
                let b = theta_average(f, g, q);
                assert!((a - b).abs() <= 1e-9 * b, "{q} {k} {a} {b}");
            }
        }
    }
}
