//! Trial functions concentrating at one pole (g_eps) or at two antipodal poles (f_eps),
//! the rescaled profile phi_eps, and the small-eps expansions of their quotients.
//!
//! L^q masses are computed in the rescaled variables x = (eps y', eps^2 y_N), where
//! eps^{-d} g_eps-check is e^{i x_N / eps^2} phi_eps(x). The fast carrier is never
//! sampled except in [`antipodal_quotient_direct`].

use crate::error::{Result, SrlError};
use crate::geometry::{abs_pow, Exponent, SphereFunction, SphereGrid};
use crate::numerics::{bessel_j0, composite_gl, lagrange_weights, least_squares, linear_fit, pairwise_sum, smooth_ramp, uniform_edges, C64};
use crate::strichartz::gaussian_strichartz_constant;
use crate::twoprofile::c_constant;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Smooth monotone ramp, 0 on (-inf, lo] and 1 on [hi, inf).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cutoff {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { lo: 0.25, hi: 0.5 }
    }
}

impl Cutoff {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(SrlError::Domain(format!("cutoff needs 0 < lo < hi < 1 (lo={lo}, hi={hi})")));
        }
        Ok(Cutoff { lo, hi })
    }

    pub fn eval(&self, s: f64) -> f64 {
        smooth_ramp((s - self.lo) / (self.hi - self.lo))
    }
}

/// Whether eps lies where the eps^2 expansion is meaningful. Larger values are allowed
/// but flagged by the sweeps.
pub fn in_expansion_regime(eps: f64) -> bool {
    eps > 0.0 && eps <= 0.5
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SrlError::Domain(format!("eps must be positive (got {eps})")));
    }
    Ok(())
}

fn bump(eps: f64, cutoff: &Cutoff, wn: f64) -> f64 {
    let c = cutoff.eval(wn);
    if c == 0.0 {
        0.0
    } else {
        c * (-(1.0 - wn) / (eps * eps)).exp()
    }
}

/// chi(omega_N) e^{-(1 - omega_N)/eps^2}.
pub fn g_eps(eps: f64, grid: &Arc<SphereGrid>, cutoff: &Cutoff) -> Result<SphereFunction> {
    check_eps(eps)?;
    Ok(SphereFunction::from_fn(grid, |w| C64::new(bump(eps, cutoff, w[w.len() - 1]), 0.0)))
}

/// g_eps plus its mirror image at the south pole.
pub fn f_eps(eps: f64, grid: &Arc<SphereGrid>, cutoff: &Cutoff) -> Result<SphereFunction> {
    check_eps(eps)?;
    Ok(SphereFunction::from_fn(grid, |w| {
        let wn = w[w.len() - 1];
        C64::new(bump(eps, cutoff, wn) + bump(eps, cutoff, -wn), 0.0)
    }))
}

// Beyond this radius in eta every amplitude is below e^{-28}.
const RHO_CAP: f64 = 7.5;

fn sphere_area(d: usize) -> f64 {
    if d == 1 {
        2.0
    } else {
        2.0 * PI
    }
}

fn rho_limit(eps: f64, cutoff: &Cutoff) -> f64 {
    if eps > 0.0 {
        ((1.0 - cutoff.lo * cutoff.lo).sqrt() / eps).min(RHO_CAP)
    } else {
        RHO_CAP
    }
}

/// p(eta) = eps^{-2}(1 - s) with s = sqrt(1 - eps^2 |eta|^2), and the weight chi(s)/s.
fn dispersion(eps: f64, cutoff: &Cutoff, rho: f64) -> (f64, f64) {
    if eps == 0.0 {
        return (0.5 * rho * rho, 1.0);
    }
    let e2r2 = eps * eps * rho * rho;
    let s = (1.0 - e2r2).max(0.0).sqrt();
    // 1 - s written without cancellation
    let p = rho * rho / (1.0 + s);
    let c = cutoff.eval(s);
    (p, if c == 0.0 { 0.0 } else { c / s })
}

/// eps^{-d} ||g_eps||^2 as an integral over the tangent plane.
pub fn scaled_l2(eps: f64, d: usize, cutoff: &Cutoff) -> Result<f64> {
    check_eps(eps)?;
    if d != 1 && d != 2 {
        return Err(SrlError::UnsupportedDimension(d));
    }
    let top = rho_limit(eps, cutoff).min(6.5);
    let (rho, w) = composite_gl(&uniform_edges(0.0, top, 128), 8);
    let v: Vec<f64> = rho
        .iter()
        .zip(&w)
        .map(|(&r, &wi)| {
            let (p, a) = dispersion(eps, cutoff, r);
            // weight chi^2/s = (chi/s)^2 s
            let s = 1.0 - eps * eps * p;
            wi * r.powi(d as i32 - 1) * (-2.0 * p).exp() * a * a * s
        })
        .collect();
    Ok(sphere_area(d) * pairwise_sum(&v))
}

/// Radial quadrature in eta for one time slice, resolving the phase r rho + p(rho) t.
struct RhoRule {
    kernel_scale: f64,
    rho: Vec<f64>,
    amp: Vec<C64>,
}

fn rho_rule(eps: f64, d: usize, cutoff: &Cutoff, t: f64, r_max: f64) -> RhoRule {
    let top = rho_limit(eps, cutoff);
    let s_min = if eps > 0.0 { (1.0 - eps * eps * top * top).max(cutoff.lo).sqrt() } else { 1.0 };
    let rate = r_max + top * t.abs() / s_min;
    let panels = ((top * rate / 4.0).ceil() as usize).max(32);
    let (rho, w) = composite_gl(&uniform_edges(0.0, top, panels), 8);
    let amp = rho
        .iter()
        .zip(&w)
        .map(|(&r, &wi)| {
            let (p, a) = dispersion(eps, cutoff, r);
            let jac = if d == 2 { r } else { 1.0 };
            C64::from_polar(wi * jac * a * (-p).exp(), -p * t)
        })
        .collect();
    let kernel_scale = if d == 2 { (2.0 * PI).powf(-1.5) * 2.0 * PI } else { (2.0 * PI).powi(-1) * 2.0 };
    RhoRule { kernel_scale, rho, amp }
}

impl RhoRule {
    fn eval(&self, d: usize, r: f64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        if d == 2 {
            for (rho, a) in self.rho.iter().zip(&self.amp) {
                s += a * bessel_j0(r * rho);
            }
        } else {
            for (rho, a) in self.rho.iter().zip(&self.amp) {
                s += a * (r * rho).cos();
            }
        }
        s * self.kernel_scale
    }
}

/// phi_eps at x in R^N, N = 2 or 3 (last coordinate is x_N).
pub fn phi_eps(x: &[f64], eps: f64, cutoff: &Cutoff) -> Result<C64> {
    check_eps(eps)?;
    phi_any(x, eps, cutoff)
}

fn phi_any(x: &[f64], eps: f64, cutoff: &Cutoff) -> Result<C64> {
    let n = x.len();
    if n != 2 && n != 3 {
        return Err(SrlError::UnsupportedDimension(n));
    }
    let d = n - 1;
    let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(rho_rule(eps, d, cutoff, x[d], r).eval(d, r))
}

/// The eps -> 0 limit (2pi)^{-1/2} (1 + i x_N)^{-d/2} e^{-|x'|^2 / (2(1 + i x_N))}.
pub fn phi_limit(x: &[f64]) -> C64 {
    let d = x.len() - 1;
    let r2: f64 = x[..d].iter().map(|v| v * v).sum();
    let s = C64::new(1.0, x[d]);
    (2.0 * PI).powf(-0.5) * s.powf(-0.5 * d as f64) * (-r2 / (2.0 * s)).exp()
}

/// Limit of int |phi_eps|^q as eps -> 0: (2pi)^{-q/2} (2pi/q)^{d/2} pi.
pub fn limit_lq(d: usize) -> f64 {
    let q = Exponent::strichartz(d).value();
    (2.0 * PI).powf(-0.5 * q) * (2.0 * PI / q).powf(0.5 * d as f64) * PI
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialConfig {
    /// Time cutoff in the rescaled x_N variable; beyond it an A/t^2 + B/t^4 tail is fitted.
    pub t_max: f64,
    /// Radial range in u = |x'| / sqrt(1 + x_N^2).
    pub u_max: f64,
    pub u_panels: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig { t_max: 40.0, u_max: 5.0, u_panels: 10 }
    }
}

fn time_edges(t_max: f64) -> Vec<f64> {
    let mut e = vec![0.0, 0.5, 1.0, 1.5, 2.0];
    while *e.last().unwrap() < t_max {
        let next = e.last().unwrap() * 1.5;
        e.push(if next > t_max * 0.95 { t_max } else { next });
    }
    e
}

/// phi_eps sampled on (t, u) with x' = sqrt(1 + t^2) u along the first axis.
struct Slices {
    t: Vec<f64>,
    wt: Vec<f64>,
    u: Vec<f64>,
    wu: Vec<f64>,
    values: Vec<Vec<C64>>,
}

fn slices_at(eps: f64, d: usize, cutoff: &Cutoff, cfg: &TrialConfig, t: Vec<f64>, wt: Vec<f64>) -> Slices {
    let (u, wu) = composite_gl(&uniform_edges(0.0, cfg.u_max, cfg.u_panels), 8);
    let values = t
        .par_iter()
        .map(|&ti| {
            let sc = (1.0 + ti * ti).sqrt();
            let rule = rho_rule(eps, d, cutoff, ti, sc * cfg.u_max);
            u.iter().map(|&ui| rule.eval(d, sc * ui)).collect()
        })
        .collect();
    Slices { t, wt, u, wu, values }
}

fn slices(eps: f64, d: usize, cutoff: &Cutoff, cfg: &TrialConfig) -> Slices {
    let (t, wt) = composite_gl(&time_edges(cfg.t_max), 8);
    slices_at(eps, d, cutoff, cfg, t, wt)
}

impl Slices {
    /// Integral over x' of density(phi) at every time node.
    fn energies(&self, d: usize, density: impl Fn(C64) -> f64) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.values)
            .map(|(&t, row)| {
                let sc = (1.0 + t * t).sqrt();
                let v: Vec<f64> = row
                    .iter()
                    .zip(self.u.iter().zip(&self.wu))
                    .map(|(z, (&u, &w))| w * u.powi(d as i32 - 1) * density(*z))
                    .collect();
                sphere_area(d) * sc.powi(d as i32) * pairwise_sum(&v)
            })
            .collect()
    }

    /// Integral over all of R^N (both signs of x_N), tail included; returns (value, tail fraction).
    fn integrate(&self, energies: &[f64], t_max: f64) -> (f64, f64) {
        let body: Vec<f64> = energies.iter().zip(&self.wt).map(|(e, w)| e * w).collect();
        let body = 2.0 * pairwise_sum(&body);
        let tail = 2.0 * fit_time_tail(&self.t, energies, t_max);
        (body + tail, tail / (body + tail))
    }
}

fn fit_time_tail(t: &[f64], e: &[f64], t_max: f64) -> f64 {
    let (rows, ys): (Vec<Vec<f64>>, Vec<f64>) = t
        .iter()
        .zip(e)
        .filter(|(&ti, _)| ti >= t_max / 3.0)
        .map(|(&ti, &ei)| (vec![1.0, 1.0 / (ti * ti)], ei * ti * ti))
        .unzip();
    let c = least_squares(&rows, &ys, &vec![1.0; ys.len()]);
    (c[0] / t_max + c[1] / (3.0 * t_max.powi(3))).max(0.0)
}

fn theta_cos_average(z: C64, q: f64) -> f64 {
    const M: usize = 256;
    let mut s = 0.0;
    for k in 0..M {
        let th = 2.0 * PI * k as f64 / M as f64;
        s += (2.0 * (z * C64::from_polar(1.0, th)).re).abs().powf(q);
    }
    s / M as f64
}

fn dim_of(n: usize) -> Result<usize> {
    match n {
        2 | 3 => Ok(n - 1),
        _ => Err(SrlError::UnsupportedDimension(n)),
    }
}

/// Quotient of a trial function together with its quadrature diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct TrialQuotient {
    pub eps: f64,
    pub quotient: f64,
    pub lq: f64,
    pub scaled_l2: f64,
    pub tail_fraction: f64,
}

/// int |phi_eps|^q over R^N (eps = 0 gives the limit profile).
pub fn lq_phi(eps: f64, d: usize, cutoff: &Cutoff, cfg: &TrialConfig) -> Result<(f64, f64)> {
    if !(eps >= 0.0) {
        return Err(SrlError::Domain(format!("eps must be >= 0 (got {eps})")));
    }
    if d != 1 && d != 2 {
        return Err(SrlError::UnsupportedDimension(d));
    }
    let q = Exponent::strichartz(d).value();
    let s = slices(eps, d, cutoff, cfg);
    Ok(s.integrate(&s.energies(d, |z| abs_pow(z, q)), cfg.t_max))
}

/// int |g_eps-check|^q / ||g_eps||^q on S^{N-1}.
pub fn single_bump_quotient(eps: f64, n: usize, cutoff: &Cutoff, cfg: &TrialConfig) -> Result<TrialQuotient> {
    check_eps(eps)?;
    let d = dim_of(n)?;
    let q = Exponent::strichartz(d).value();
    let (lq, tail_fraction) = lq_phi(eps, d, cutoff, cfg)?;
    let l2 = scaled_l2(eps, d, cutoff)?;
    Ok(TrialQuotient { eps, quotient: lq / l2.powf(0.5 * q), lq, scaled_l2: l2, tail_fraction })
}

/// int |f_eps-check|^q / ||f_eps||^q with the carrier replaced by its phase average.
pub fn antipodal_quotient(eps: f64, n: usize, cutoff: &Cutoff, cfg: &TrialConfig) -> Result<TrialQuotient> {
    check_eps(eps)?;
    let d = dim_of(n)?;
    let q = Exponent::strichartz(d).value();
    let s = slices(eps, d, cutoff, cfg);
    let (lq, tail_fraction) = s.integrate(&s.energies(d, |z| theta_cos_average(z, q)), cfg.t_max);
    let l2 = 2.0 * scaled_l2(eps, d, cutoff)?;
    Ok(TrialQuotient { eps, quotient: lq / l2.powf(0.5 * q), lq, scaled_l2: l2, tail_fraction })
}

/// Same quotient as [`antipodal_quotient`] but integrating |2 Re(e^{i x_N/eps^2} phi_eps)|^q
/// directly. phi_eps / phi_0 is interpolated in x_N within panels and the carrier is
/// resolved with 32 nodes per period.
pub fn antipodal_quotient_direct(eps: f64, n: usize, cutoff: &Cutoff, cfg: &TrialConfig) -> Result<TrialQuotient> {
    check_eps(eps)?;
    let d = dim_of(n)?;
    let q = Exponent::strichartz(d).value();
    let mut edges = vec![0.0];
    while *edges.last().unwrap() < cfg.t_max {
        let e = *edges.last().unwrap();
        let next = (e + 0.25).max(e * 1.08);
        edges.push(if next > cfg.t_max * 0.97 { cfg.t_max } else { next });
    }
    let (t, wt) = composite_gl(&edges, 8);
    let s = slices_at(eps, d, cutoff, cfg, t, wt);
    let period = 2.0 * PI * eps * eps;
    let panel_energy: Vec<f64> = (0..edges.len() - 1)
        .into_par_iter()
        .map(|p| {
            let (a, b) = (edges[p], edges[p + 1]);
            let nodes = &s.t[8 * p..8 * p + 8];
            let ratios: Vec<Vec<C64>> = (0..8)
                .map(|k| {
                    let sc = (1.0 + nodes[k] * nodes[k]).sqrt();
                    s.u.iter()
                        .zip(&s.values[8 * p + k])
                        .map(|(&u, z)| z / phi_limit(&limit_point(d, sc * u, nodes[k])))
                        .collect()
                })
                .collect();
            let sub = (((b - a) / period) * 4.0).ceil().max(1.0) as usize;
            let (tf, wf) = composite_gl(&uniform_edges(a, b, sub), 8);
            let mut total = 0.0;
            for (&ti, &wi) in tf.iter().zip(&wf) {
                let lw = lagrange_weights(nodes, ti);
                let sc = (1.0 + ti * ti).sqrt();
                let carrier = C64::from_polar(1.0, ti / (eps * eps));
                let v: Vec<f64> = (0..s.u.len())
                    .map(|j| {
                        let r: C64 = (0..8).map(|k| ratios[k][j] * lw[k]).sum();
                        let z = r * phi_limit(&limit_point(d, sc * s.u[j], ti));
                        s.wu[j] * s.u[j].powi(d as i32 - 1) * (2.0 * (carrier * z).re).abs().powf(q)
                    })
                    .collect();
                total += wi * sphere_area(d) * sc.powi(d as i32) * pairwise_sum(&v);
            }
            total
        })
        .collect();
    let body = 2.0 * pairwise_sum(&panel_energy);
    let avg = s.energies(d, |z| theta_cos_average(z, q));
    let tail = 2.0 * fit_time_tail(&s.t, &avg, cfg.t_max);
    let lq = body + tail;
    let l2 = 2.0 * scaled_l2(eps, d, cutoff)?;
    Ok(TrialQuotient { eps, quotient: lq / l2.powf(0.5 * q), lq, scaled_l2: l2, tail_fraction: tail / lq })
}

fn limit_point(d: usize, r: f64, t: f64) -> Vec<f64> {
    let mut x = vec![0.0; d + 1];
    x[0] = r;
    x[d] = t;
    x
}

/// Straight-line fit of an observable against eps^2.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    pub eps2_values: Vec<f64>,
    pub observable: Vec<f64>,
    pub intercept: f64,
    pub slope: f64,
    pub residual: f64,
    pub trusted: bool,
    pub max_tail_fraction: f64,
}

impl ExpansionFit {
    pub fn new(eps2_values: Vec<f64>, observable: Vec<f64>) -> Result<Self> {
        if eps2_values.len() < 4 || eps2_values.len() != observable.len() {
            return Err(SrlError::Domain("an expansion fit needs at least 4 paired points".into()));
        }
        if eps2_values.windows(2).any(|w| w[1] >= w[0]) || *eps2_values.last().unwrap() <= 0.0 {
            return Err(SrlError::Domain("eps^2 values must be positive and strictly decreasing".into()));
        }
        let (slope, intercept, residual) = linear_fit(&eps2_values, &observable);
        let trusted = residual <= 0.1 * slope.abs();
        Ok(ExpansionFit { eps2_values, observable, intercept, slope, residual, trusted, max_tail_fraction: 0.0 })
    }

    pub fn to_csv(&self, column: &str) -> String {
        let mut s = format!("eps2,{column}\n");
        for (e, v) in self.eps2_values.iter().zip(&self.observable) {
            s.push_str(&format!("{e},{v}\n"));
        }
        s
    }
}

fn sweep(eps_list: &[f64], f: impl Fn(f64) -> Result<TrialQuotient> + Sync) -> Result<ExpansionFit> {
    for &e in eps_list {
        check_eps(e)?;
        if e > 0.35 {
            return Err(SrlError::Domain(format!("sweep values must lie in (0, 0.35] (got {e})")));
        }
    }
    let rows: Vec<TrialQuotient> = eps_list.par_iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let mut fit = ExpansionFit::new(eps_list.iter().map(|e| e * e).collect(), rows.iter().map(|r| r.quotient.ln()).collect())?;
    fit.max_tail_fraction = rows.iter().map(|r| r.tail_fraction).fold(0.0, f64::max);
    fit.trusted &= fit.max_tail_fraction < 0.1;
    Ok(fit)
}

/// log quotient(g_eps) against eps^2; intercept near log S_d^G, slope near 1/4.
pub fn single_bump_sweep(eps_list: &[f64], n: usize) -> Result<ExpansionFit> {
    let cfg = TrialConfig::default();
    sweep(eps_list, |e| single_bump_quotient(e, n, &Cutoff::default(), &cfg))
}

/// log quotient(f_eps) against eps^2; intercept near log(c(q) S_d^G), slope near 1/4.
pub fn antipodal_sweep(eps_list: &[f64], n: usize) -> Result<ExpansionFit> {
    let cfg = TrialConfig::default();
    sweep(eps_list, |e| antipodal_quotient(e, n, &Cutoff::default(), &cfg))
}

/// log int |phi_eps|^q against eps^2. The slope estimates 1/2 - d^2/16.
pub fn lq_sweep(eps_list: &[f64], n: usize) -> Result<ExpansionFit> {
    let d = dim_of(n)?;
    let cfg = TrialConfig::default();
    sweep(eps_list, |e| {
        let (lq, tail) = lq_phi(e, d, &Cutoff::default(), &cfg)?;
        Ok(TrialQuotient { eps: e, quotient: lq, lq, scaled_l2: f64::NAN, tail_fraction: tail })
    })
}

/// d/d(eps^2) of log int |phi_eps|^q at eps = 0, from a quadratic fit in eps^2 that
/// includes the eps = 0 limit. Expected value 1/2 - d^2/16.
pub fn lq_derivative_ratio(n: usize) -> Result<f64> {
    let d = dim_of(n)?;
    let cfg = TrialConfig::default();
    let eps2 = [0.04, 0.03, 0.02, 0.01, 0.0];
    let obs: Vec<f64> = eps2
        .par_iter()
        .map(|&e2: &f64| lq_phi(e2.sqrt(), d, &Cutoff::default(), &cfg).map(|v| v.0.ln()))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = eps2.iter().map(|&e| vec![1.0, e, e * e]).collect();
    Ok(least_squares(&rows, &obs, &[1.0; 5])[1])
}

/// eps^{-d} ||g_eps||^2 / pi^{d/2} against eps^2. The slope estimates d(2-d)/16.
pub fn l2_sweep(eps_list: &[f64], n: usize) -> Result<ExpansionFit> {
    let d = dim_of(n)?;
    let mut eps2 = Vec::new();
    let mut obs = Vec::new();
    for &e in eps_list {
        eps2.push(e * e);
        obs.push(scaled_l2(e, d, &Cutoff::default())? / PI.powf(0.5 * d as f64));
    }
    ExpansionFit::new(eps2, obs)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCertificate {
    pub n: usize,
    pub eps: f64,
    pub quotient: f64,
    pub threshold: f64,
    pub margin: f64,
    pub pass: bool,
    pub trusted: bool,
}

/// quotient(f_eps) - c(q) S_{N-1}^G.
pub fn gap_certificate(n: usize, eps: f64) -> Result<GapCertificate> {
    let d = dim_of(n)?;
    if !(eps > 0.0 && eps <= 0.35) {
        return Err(SrlError::Domain(format!("gap certificate needs eps in (0, 0.35] (got {eps})")));
    }
    let q = Exponent::strichartz(d).value();
    let r = antipodal_quotient(eps, n, &Cutoff::default(), &TrialConfig::default())?;
    let threshold = c_constant(q) * gaussian_strichartz_constant(d);
    let margin = r.quotient - threshold;
    let trusted = r.tail_fraction < 0.1;
    Ok(GapCertificate { n, eps, quotient: r.quotient, threshold, margin, pass: margin > 0.0 && trusted, trusted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_profile_mass() {
        for d in [1, 2] {
            let (v, _) = lq_phi(0.0, d, &Cutoff::default(), &TrialConfig::default()).unwrap();
            assert!((v / limit_lq(d) - 1.0).abs() < 1e-6, "{d} {v}");
        }
    }

    #[test]
    fn phi_at_origin() {
        let v = phi_eps(&[0.0, 0.0, 0.0], 0.05, &Cutoff::default()).unwrap();
        assert!((v - C64::new((2.0 * PI).powf(-0.5), 0.0)).norm() < 2e-3);
        let x = [0.7, -0.3, 1.2];
        let a = phi_any(&x, 0.0, &Cutoff::default()).unwrap();
        assert!((a - phi_limit(&x)).norm() < 1e-10);
    }
}
