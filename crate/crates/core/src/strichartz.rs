//! Schrodinger-type propagators, space-time Strichartz quotients and Gaussian closed forms.

use crate::error::{Result, SrlError};
use crate::geometry::{abs_pow, Exponent, ProfileFunction};
use crate::numerics::{apply_separable, composite_gl, gauss_legendre_on, least_squares, pairwise_sum, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

pub type PhaseFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Dispersion {
    /// xi -> |xi|^2 / 2, i.e. e^{it Delta/2}.
    Parabolic,
    /// xi -> T(|xi|^2) with T(E) = 1 - sqrt(1 - E), for frequencies in the ball of radius `support` <= 1.
    Perturbed { support: f64 },
    /// Elliptic phase with Hessian Id at 0, valid in the ball of radius `support` <= 1.
    Custom { name: String, phase: PhaseFn, support: f64 },
}

impl std::fmt::Debug for Dispersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

pub fn t_of_e(e: f64) -> f64 {
    // 1 - sqrt(1 - E) without cancellation
    e / (1.0 + (1.0 - e).sqrt())
}

impl Dispersion {
    pub fn name(&self) -> String {
        match self {
            Dispersion::Parabolic => "parabolic".into(),
            Dispersion::Perturbed { support } => format!("perturbed(eps={support})"),
            Dispersion::Custom { name, support, .. } => format!("custom:{name}(eps={support})"),
        }
    }

    pub fn support(&self) -> Option<f64> {
        match self {
            Dispersion::Parabolic => None,
            Dispersion::Perturbed { support } | Dispersion::Custom { support, .. } => Some(*support),
        }
    }

    pub fn phase(&self, xi: &[f64]) -> f64 {
        let e: f64 = xi.iter().map(|t| t * t).sum();
        match self {
            Dispersion::Parabolic => 0.5 * e,
            Dispersion::Perturbed { .. } => t_of_e(e.min(1.0)),
            Dispersion::Custom { phase, .. } => phase(xi),
        }
    }

    /// Phase after rescaling frequencies by k: eta -> phase(k eta) / k^2.
    fn rescaled_phase(&self, k: f64, eta: &[f64]) -> f64 {
        let xi: Vec<f64> = eta.iter().map(|t| t * k).collect();
        self.phase(&xi) / (k * k)
    }
}

/// Relative spectral mass of psi outside the ball of radius r.
pub fn spectral_mass_outside(psi: &ProfileFunction, r: f64) -> f64 {
    let s = psi.dft();
    let mut out = 0.0;
    let mut tot = 0.0;
    for (i, v) in s.values.iter().enumerate() {
        let m = v.norm_sqr();
        tot += m;
        if s.freq(i).iter().map(|t| t * t).sum::<f64>().sqrt() > r {
            out += m;
        }
    }
    if tot > 0.0 {
        out / tot
    } else {
        0.0
    }
}

/// Lattice propagator with multiplier e^{-it phase(xi)} on the dual lattice.
pub fn propagate(psi: &ProfileFunction, t: f64, disp: &Dispersion) -> Result<ProfileFunction> {
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let support = disp.support();
    if let Some(r) = support {
        let m = spectral_mass_outside(psi, r);
        if m > 1e-12 {
            return Err(SrlError::FrequencySupport(m, r));
        }
    }
    let mut s = psi.dft();
    for i in 0..s.values.len() {
        let xi = s.freq(i);
        if let Some(r) = support {
            if xi.iter().map(|t| t * t).sum::<f64>().sqrt() > r {
                continue;
            }
        }
        s.values[i] *= C64::from_polar(1.0, -t * disp.phase(&xi));
    }
    Ok(s.inverse())
}

#[derive(Clone, Debug, Serialize)]
pub struct StrichartzReport {
    pub d: usize,
    pub dispersion: String,
    pub spacetime_energy: f64,
    pub l2_norm: f64,
    pub quotient: f64,
    pub tail_fraction: f64,
    pub trusted: bool,
}

#[derive(Clone, Debug)]
pub struct SpaceTimeConfig {
    pub t_max: f64,
    pub growth: f64,
    pub amp_tol: f64,
}

impl Default for SpaceTimeConfig {
    fn default() -> Self {
        SpaceTimeConfig { t_max: 40.0, growth: 1.5, amp_tol: 1e-10 }
    }
}

/// Radius beyond which the discrete spectrum is below tol * max.
pub fn spectral_radius(psi: &ProfileFunction, tol: f64) -> f64 {
    let s = psi.dft();
    let mx = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut r: f64 = 0.0;
    for (i, v) in s.values.iter().enumerate() {
        if v.norm() > tol * mx {
            r = r.max(s.freq(i).iter().map(|t| t * t).sum::<f64>().sqrt());
        }
    }
    r + s.lattice.dual_spacing(0)
}

/// Time nodes on [0, t_max]: two GL panels on [0, t0], geometric panels beyond.
fn time_nodes(t0: f64, t_max: f64, growth: f64) -> (Vec<f64>, Vec<f64>, (f64, f64)) {
    let mut edges = vec![0.0, 0.5 * t0, t0];
    let mut e = t0;
    while e < t_max {
        e = (e * growth).min(t_max);
        if t_max - e < 0.2 * e * (growth - 1.0) {
            e = t_max;
        }
        edges.push(e);
    }
    let n = edges.len();
    let last = (edges[n - 2], edges[n - 1]);
    let (t, w) = composite_gl(&edges, 8);
    (t, w, last)
}

/// Space-time integral of `integrand` evaluated on the free flows of several profiles,
/// profile i evolved to time sign_i * t. Values handed to the integrand are exact up to a
/// pointwise unimodular factor common to all profiles.
pub fn parabolic_energy(
    profiles: &[(&ProfileFunction, f64)],
    q: f64,
    integrand: &(dyn Fn(&[C64]) -> f64 + Sync),
    cfg: &SpaceTimeConfig,
) -> Result<(f64, f64)> {
    let lat = &profiles[0].0.lattice;
    if profiles.iter().any(|(p, _)| p.lattice != *lat) {
        return Err(SrlError::GridMismatch);
    }
    let d = lat.dim();
    let h = lat.spacing;
    let nonzero: Vec<&ProfileFunction> = profiles.iter().map(|p| p.0).filter(|p| p.norm() > 0.0).collect();
    if nonzero.is_empty() {
        return Err(SrlError::ZeroNorm);
    }
    let big_l = nonzero.iter().map(|p| p.effective_radius(cfg.amp_tol)).fold(0.0, f64::max);
    let big_k = nonzero.iter().map(|p| spectral_radius(p, cfg.amp_tol)).fold(0.0, f64::max);
    let nyq = PI / h;
    if big_k > 0.9 * nyq {
        return Err(SrlError::Domain(format!("profile not resolved: spectral radius {big_k} vs Nyquist {nyq}")));
    }
    let t0 = (1.5 * big_l / (nyq - big_k)).max(0.05);
    let symmetric = profiles.iter().all(|(p, _)| p.is_real());
    let (tn, tw, last_panel) = time_nodes(t0, cfg.t_max, cfg.growth);

    let ys: Vec<Vec<f64>> = (0..d).map(|a| lat.axis(a)).collect();

    // large times: lens route on a frequency grid
    let xi_max = big_l / t0 + big_k + 2.0;
    let dxi = 0.8 * 2.0 * PI / (q * big_l.max(1.0));
    let nxi = (xi_max / dxi).ceil() as i64;
    let xis: Vec<f64> = (-nxi..=nxi).map(|m| m as f64 * dxi).collect();
    let lens_mats: Vec<Vec<(Vec<C64>, usize)>> = profiles
        .iter()
        .map(|(_, s)| {
            (0..d)
                .map(|a| {
                    let mut m = Vec::with_capacity(xis.len() * ys[a].len());
                    for &xi in &xis {
                        for &y in &ys[a] {
                            m.push(C64::from_polar(h, -s.signum() * xi * y));
                        }
                    }
                    (m, xis.len())
                })
                .collect()
        })
        .collect();
    let sq: Vec<f64> = (0..lat.len()).map(|i| lat.point(i).iter().map(|t| t * t).sum()).collect();

    let slice_energy = |t: f64| -> f64 {
        if t.abs() <= t0 * (1.0 + 1e-12) {
            // Fourier route on a box that holds the spreading solution
            let x_half = big_l + big_k * t.abs() + 2.0;
            let dx = h.min(0.8 * 2.0 * PI / (q * big_k));
            let nx = (x_half / dx).ceil() as i64;
            let xs: Vec<f64> = (-nx..=nx).map(|j| j as f64 * dx).collect();
            let period = 2.0 * x_half + 2.0;
            let dk = 2.0 * PI / period;
            let nk = ((big_k + 1.0) / dk).ceil() as i64;
            let ks: Vec<f64> = (-nk..=nk).map(|m| m as f64 * dk).collect();
            let fwd: Vec<(Vec<C64>, usize)> = (0..d)
                .map(|a| {
                    let mut m = Vec::with_capacity(ks.len() * ys[a].len());
                    for &k in &ks {
                        for &y in &ys[a] {
                            m.push(C64::from_polar(h * dk / (2.0 * PI), -k * y));
                        }
                    }
                    (m, ks.len())
                })
                .collect();
            let back: Vec<(Vec<C64>, usize)> = (0..d)
                .map(|_| {
                    let mut m = Vec::with_capacity(xs.len() * ks.len());
                    for &x in &xs {
                        for &k in &ks {
                            m.push(C64::from_polar(1.0, x * k));
                        }
                    }
                    (m, xs.len())
                })
                .collect();
            let k2: Vec<f64> = {
                let nkk = ks.len();
                (0..nkk.pow(d as u32))
                    .map(|idx| {
                        let mut r = idx;
                        let mut e = 0.0;
                        for _ in 0..d {
                            e += ks[r % nkk] * ks[r % nkk];
                            r /= nkk;
                        }
                        e
                    })
                    .collect()
            };
            let fields: Vec<Vec<C64>> = profiles
                .iter()
                .map(|(p, s)| {
                    let tau = s * t;
                    let (mut hat, shape) = apply_separable(&p.values, &lat.shape, &fwd);
                    for (v, e) in hat.iter_mut().zip(&k2) {
                        *v *= C64::from_polar(1.0, -0.5 * tau * e);
                    }
                    apply_separable(&hat, &shape, &back).0
                })
                .collect();
            let n = fields[0].len();
            let mut buf = vec![C64::new(0.0, 0.0); fields.len()];
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    for (b, f) in buf.iter_mut().zip(&fields) {
                        *b = f[i];
                    }
                    integrand(&buf)
                })
                .collect();
            dx.powi(d as i32) * pairwise_sum(&v)
        } else {
            let amp = (2.0 * PI * t.abs()).powf(-0.5 * d as f64);
            let fields: Vec<Vec<C64>> = profiles
                .iter()
                .zip(&lens_mats)
                .map(|((p, s), mats)| {
                    let tau = s * t;
                    let chirped: Vec<C64> =
                        p.values.iter().zip(&sq).map(|(v, r2)| v * C64::from_polar(amp, r2 / (2.0 * tau))).collect();
                    apply_separable(&chirped, &lat.shape, mats).0
                })
                .collect();
            let n = fields[0].len();
            let mut buf = vec![C64::new(0.0, 0.0); fields.len()];
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    for (b, f) in buf.iter_mut().zip(&fields) {
                        *b = f[i];
                    }
                    integrand(&buf)
                })
                .collect();
            (t.abs() * dxi).powi(d as i32) * pairwise_sum(&v)
        }
    };

    let mut times: Vec<(f64, f64)> = tn.iter().zip(&tw).map(|(t, w)| (*t, *w)).collect();
    if !symmetric {
        let neg: Vec<(f64, f64)> = times.iter().map(|(t, w)| (-t, *w)).collect();
        times.extend(neg);
    }
    let energies: Vec<f64> = times.par_iter().map(|(t, _)| slice_energy(*t)).collect();
    let factor = if symmetric { 2.0 } else { 1.0 };
    let body: Vec<f64> = times.iter().zip(&energies).map(|((_, w), e)| w * e * factor).collect();
    let body = pairwise_sum(&body);

    let tail = factor * time_tail(&times, &energies, last_panel, symmetric, cfg.t_max);
    let total = body + tail;
    Ok((total, if total > 0.0 { tail / total } else { 0.0 }))
}

/// Space-time energy for a dispersion supported in the ball of radius k: rescale to the unit
/// ball and integrate with a Fourier route on growing spatial boxes.
fn generic_energy(psi: &ProfileFunction, disp: &Dispersion, q: f64, cfg: &SpaceTimeConfig) -> Result<(f64, f64)> {
    let k = disp.support().unwrap_or(1.0);
    let m = spectral_mass_outside(psi, k);
    if m > 1e-12 {
        return Err(SrlError::FrequencySupport(m, k));
    }
    let d = psi.dim();
    // phi(y) = k^{-d/2} psi(y / k): same values, spacing multiplied by k
    let mut phi = psi.scaled(C64::new(k.powf(-0.5 * d as f64), 0.0));
    phi.lattice.spacing *= k;
    let big_l = phi.effective_radius(cfg.amp_tol);
    // frequency rule on the unit box
    let n_eta_base = 24usize;
    let lat = &phi.lattice;
    let ys: Vec<Vec<f64>> = (0..d).map(|a| lat.axis(a)).collect();
    let h = lat.spacing;
    // velocity bound over the unit ball
    let vmax = {
        let mut v: f64 = 0.0;
        for i in 1..=200 {
            let r = i as f64 / 200.0;
            let dr = 1e-6;
            let a = disp.rescaled_phase(k, &[r + dr]);
            let b = disp.rescaled_phase(k, &[r - dr]);
            v = v.max((a - b) / (2.0 * dr));
        }
        v
    };
    let t_max = cfg.t_max;
    let (tn, tw, last_panel) = time_nodes(0.5, t_max, cfg.growth);
    let dx = PI / q;
    let symmetric = psi.is_real();
    let slice = |t: f64| -> f64 {
        let w = big_l + vmax * t.abs() + 4.0;
        let n_eta = n_eta_base + (1.2 * w).ceil() as usize;
        let (eta, weta) = gauss_legendre_on(n_eta, -1.0, 1.0);
        // phi-hat on the tensor GL grid
        let mats: Vec<(Vec<C64>, usize)> = (0..d)
            .map(|a| {
                let mut m = Vec::with_capacity(n_eta * ys[a].len());
                for &e in &eta {
                    for &y in &ys[a] {
                        m.push(C64::from_polar(h / (2.0 * PI).sqrt(), -e * y));
                    }
                }
                (m, n_eta)
            })
            .collect();
        let (mut hat, shape) = apply_separable(&phi.values, &lat.shape, &mats);
        let total: usize = shape.iter().product();
        for idx in 0..total {
            let mut r = idx;
            let mut e = vec![0.0; d];
            let mut wt = 1.0;
            for a in (0..d).rev() {
                let j = r % n_eta;
                r /= n_eta;
                e[a] = eta[j];
                wt *= weta[j];
            }
            let ph = disp.rescaled_phase(k, &e);
            hat[idx] *= C64::from_polar(wt / (2.0 * PI).sqrt(), -t * ph);
        }
        let nx = (w / dx).ceil() as i64;
        let xs: Vec<f64> = (-nx..=nx).map(|j| j as f64 * dx).collect();
        let back: Vec<(Vec<C64>, usize)> = (0..d)
            .map(|_| {
                let mut m = Vec::with_capacity(xs.len() * n_eta);
                for &x in &xs {
                    for &e in &eta {
                        m.push(C64::from_polar(1.0, x * e));
                    }
                }
                (m, xs.len())
            })
            .collect();
        let (u, _) = apply_separable(&hat, &shape, &back);
        let v: Vec<f64> = u.iter().map(|z| abs_pow(*z, q)).collect();
        dx.powi(d as i32) * pairwise_sum(&v)
    };
    let mut times: Vec<(f64, f64)> = tn.iter().zip(&tw).map(|(t, w)| (*t, *w)).collect();
    if !symmetric {
        let neg: Vec<(f64, f64)> = times.iter().map(|(t, w)| (-t, *w)).collect();
        times.extend(neg);
    }
    let factor = if symmetric { 2.0 } else { 1.0 };
    let energies: Vec<f64> = times.par_iter().map(|(t, _)| slice(*t)).collect();
    let body = pairwise_sum(&times.iter().zip(&energies).map(|((_, w), e)| w * e * factor).collect::<Vec<_>>());
    let tail = factor * time_tail(&times, &energies, last_panel, symmetric, cfg.t_max);
    let total = body + tail;
    Ok((total, if total > 0.0 { tail / total } else { 0.0 }))
}

/// Fit E(t) = A/t^2 + B/t^4 over the outer panels of each time half-line and integrate beyond t_max.
fn time_tail(times: &[(f64, f64)], energies: &[f64], last_panel: (f64, f64), symmetric: bool, t_max: f64) -> f64 {
    let lo = last_panel.0 - 0.5 * (last_panel.1 - last_panel.0);
    let sides: Vec<f64> = if symmetric { vec![1.0] } else { vec![1.0, -1.0] };
    let mut tail = 0.0;
    for s in sides {
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        let mut ws = Vec::new();
        for ((t, w), e) in times.iter().zip(energies) {
            let t = t * s;
            if t >= lo {
                rows.push(vec![1.0, 1.0 / (t * t)]);
                ys.push(e * t * t);
                ws.push(*w);
            }
        }
        let c = least_squares(&rows, &ys, &ws);
        tail += c[0] / t_max + c[1] / (3.0 * t_max.powi(3));
    }
    tail.max(0.0)
}

pub fn strichartz_prefactor(d: usize) -> f64 {
    (2.0 * PI).powf(-(d as f64 + 2.0) / d as f64)
}

pub fn strichartz_quotient(psi: &ProfileFunction, d: usize, disp: &Dispersion) -> Result<StrichartzReport> {
    strichartz_quotient_with(psi, d, disp, &SpaceTimeConfig::default())
}

pub fn strichartz_quotient_with(psi: &ProfileFunction, d: usize, disp: &Dispersion, cfg: &SpaceTimeConfig) -> Result<StrichartzReport> {
    if psi.dim() != d {
        return Err(SrlError::UnsupportedDimension(d));
    }
    let l2 = psi.norm();
    if l2 == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    let q = Exponent::strichartz(d).value();
    let (energy, tail) = match disp {
        Dispersion::Parabolic => parabolic_energy(&[(psi, 1.0)], q, &|v: &[C64]| abs_pow(v[0], q), cfg)?,
        _ => generic_energy(psi, disp, q, cfg)?,
    };
    Ok(StrichartzReport {
        d,
        dispersion: disp.name(),
        spacetime_energy: energy,
        l2_norm: l2,
        quotient: strichartz_prefactor(d) * energy / l2.powf(q),
        tail_fraction: tail,
        trusted: tail < 0.1,
    })
}

/// S_d^G = (2 pi)^{-(d+2)/d} (2 pi / q)^{d/2} pi pi^{-dq/4}, q = 2 + 4/d.
pub fn gaussian_strichartz_constant(d: usize) -> f64 {
    let df = d as f64;
    let q = 2.0 + 4.0 / df;
    strichartz_prefactor(d) * (2.0 * PI / q).powf(0.5 * df) * PI * PI.powf(-df * q / 4.0)
}

/// Closed forms of the integral of e^{i x.eta - s|eta|^2/2} |eta|^order over R^d.
pub fn gaussian_integral(s: C64, x: &[f64], order: u32, d: usize) -> Result<C64> {
    if !(s.re > 0.0) {
        return Err(SrlError::Domain("Re s must be positive".into()));
    }
    let r2: f64 = x.iter().map(|t| t * t).sum();
    let df = d as f64;
    let base = (C64::new(2.0 * PI, 0.0) / s).powf(0.5 * df) * (-r2 / (2.0 * s)).exp();
    let bracket = match order {
        0 => C64::new(1.0, 0.0),
        2 => df / s - r2 / (s * s),
        4 => df * (df + 2.0) / (s * s) - 2.0 * (df + 2.0) * r2 / (s * s * s) + r2 * r2 / (s * s * s * s),
        _ => return Err(SrlError::Domain(format!("unsupported order {order}"))),
    };
    Ok(base * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((gaussian_strichartz_constant(2) - 1.0 / (8.0 * PI * PI)).abs() < 1e-15);
        assert!((gaussian_strichartz_constant(1) - (2.0 * PI).powi(-3) / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_propagation_closed_form() {
        let psi = ProfileFunction::gaussian(1, 0.1, 200);
        for &t in &[0.5, 2.0, -1.3] {
            let u = propagate(&psi, t, &Dispersion::Parabolic).unwrap();
            for (i, v) in u.values.iter().enumerate().step_by(7) {
                let x = u.lattice.point(i)[0];
                if x.abs() > 8.0 {
                    continue;
                }
                let s = C64::new(1.0, t);
                let exact = s.powf(-0.5) * (-x * x / (2.0 * s)).exp();
                assert!((v - exact).norm() < 1e-8, "{t} {x}");
            }
        }
    }
}
