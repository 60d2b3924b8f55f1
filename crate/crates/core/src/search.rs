//! Fixed-point ascent for the Stein-Tomas quotient, with modulation gauge fixing.
//!
//! The update f <- normalize(E*(|Ef|^{q-2} Ef)) uses the discrete adjoint of the
//! truncated space quadrature, so the truncated quotient cannot decrease; that is the
//! quantity the monotonicity guard watches. Reported quotients include the tail model.

use crate::error::{Result, SrlError};
use crate::extension::{adjoint_on_space, energy_of_field, extend_on_space};
use crate::geometry::{abs_pow, harmonic_basis, harmonics_at, inner_product, make_space_grid, make_sphere_grid, Exponent, SpaceGrid, SphereFunction, SphereGrid, SphereLayout};
use crate::numerics::C64;
use crate::strichartz::gaussian_strichartz_constant;
use crate::twoprofile::c_constant;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub n: usize,
    pub sphere_resolution: usize,
    pub r_max: f64,
    pub radial_nodes: usize,
    pub angular_resolution: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub el_tol: f64,
    pub guard: f64,
    pub kappa: f64,
    pub starts: usize,
    pub seed: u64,
    pub degree: Option<usize>,
}

impl SearchConfig {
    pub fn for_dimension(n: usize) -> Result<Self> {
        let base = SearchConfig {
            n,
            sphere_resolution: 24,
            r_max: 30.0,
            radial_nodes: 240,
            angular_resolution: 13,
            max_iters: 400,
            tol: 1e-9,
            el_tol: 1e-5,
            guard: 1e-9,
            kappa: 3.0,
            starts: 8,
            seed: 1,
            degree: None,
        };
        match n {
            3 => Ok(base),
            2 => Ok(SearchConfig { sphere_resolution: 128, r_max: 80.0, radial_nodes: 640, angular_resolution: 64, ..base }),
            _ => Err(SrlError::UnsupportedDimension(n)),
        }
    }

    pub fn quick(mut self) -> Self {
        self.starts = self.starts.min(4);
        self
    }

    pub fn sphere(&self) -> Result<Arc<SphereGrid>> {
        make_sphere_grid(self.n, self.sphere_resolution)
    }

    pub fn space(&self) -> Result<SpaceGrid> {
        let tau = if self.n == 3 { 1.0 } else { 0.5 };
        make_space_grid(self.n, self.r_max, self.radial_nodes, self.angular_resolution, tau)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AscentTrace {
    /// Quotient with the tail model, one entry per accepted iterate (entry 0 is the start).
    pub iterates: Vec<f64>,
    /// Quotient over the truncated grid; this is the guarded sequence.
    pub truncated: Vec<f64>,
    pub gauge_shifts: Vec<Vec<f64>>,
    pub el_residual: f64,
    pub tail_fraction: f64,
    pub converged: bool,
    pub damping: f64,
    pub guard_trips: usize,
    pub degree: usize,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub final_function: SphereFunction,
}

impl AscentTrace {
    pub fn final_quotient(&self) -> f64 {
        *self.iterates.last().unwrap()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("trace serializes");
        v["final_function"] = self.final_function.to_json();
        v
    }
}

/// Complex Gaussian node values averaged once against e^{kappa (omega . omega' - 1)}.
pub fn random_smooth(grid: &Arc<SphereGrid>, seed: u64, kappa: f64) -> SphereFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<C64> = (0..grid.len())
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let a = grid.nodes[i];
            let mut s = C64::new(0.0, 0.0);
            for j in 0..grid.len() {
                let b = grid.nodes[j];
                let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                s += g[j] * (grid.weights[j] * (kappa * (c - 1.0)).exp());
            }
            s
        })
        .collect();
    SphereFunction { grid: grid.clone(), values }
}

const GAUGE_HALF: f64 = 6.0;
const GAUGE_STEP: f64 = PI / 4.0;

fn grid_axis() -> Vec<f64> {
    let m = (GAUGE_HALF / GAUGE_STEP).floor() as i64;
    (-m..=m).map(|k| k as f64 * GAUGE_STEP).collect()
}

/// |f-check|^2 with gradient and Hessian at x.
fn peak_derivatives(f: &SphereFunction, x: &[f64; 3], n: usize) -> (f64, [f64; 3], [[f64; 3]; 3]) {
    let g = &f.grid;
    let mut u = C64::new(0.0, 0.0);
    let mut gu = [C64::new(0.0, 0.0); 3];
    let mut hu = [[C64::new(0.0, 0.0); 3]; 3];
    for j in 0..g.len() {
        let w = g.nodes[j];
        let ph = f.values[j] * C64::from_polar(g.weights[j], x[0] * w[0] + x[1] * w[1] + x[2] * w[2]);
        u += ph;
        for a in 0..n {
            gu[a] += ph * C64::new(0.0, w[a]);
            for b in 0..n {
                hu[a][b] -= ph * (w[a] * w[b]);
            }
        }
    }
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for a in 0..n {
        grad[a] = 2.0 * (u.conj() * gu[a]).re;
        for b in 0..n {
            hess[a][b] = 2.0 * (gu[a].conj() * gu[b] + u.conj() * hu[a][b]).re;
        }
    }
    (u.norm_sqr(), grad, hess)
}

fn solve(h: &[[f64; 3]; 3], g: &[f64; 3], n: usize) -> Option<[f64; 3]> {
    let mut a = [[0.0; 4]; 3];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = h[i][j];
        }
        a[i][3] = g[i];
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        a.swap(c, p);
        if a[c][c].abs() < 1e-14 {
            return None;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..4 {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let mut x = [0.0; 3];
    for i in 0..n {
        x[i] = a[i][3] / a[i][i];
    }
    Some(x)
}

/// Location of the largest |f-check| on a pi/4 lattice over [-6, 6]^N, refined by Newton.
/// Ties go to the lexicographically first lattice point.
pub fn peak_location(f: &SphereFunction) -> Vec<f64> {
    let g = &f.grid;
    let n = g.dim;
    let axis = grid_axis();
    let m = axis.len();
    // per-axis phase tables e^{i s w_a}
    let tables: Vec<Vec<Vec<C64>>> = (0..n)
        .map(|a| axis.iter().map(|&s| g.nodes.iter().map(|w| C64::from_polar(1.0, s * w[a])).collect()).collect())
        .collect();
    let fw: Vec<C64> = f.values.iter().zip(&g.weights).map(|(v, w)| v * *w).collect();
    let total = m.pow(n as u32);
    let vals: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let i0 = idx / m.pow(n as u32 - 1);
            let i1 = (idx / m.pow(n as u32 - 2)) % m;
            let mut s = C64::new(0.0, 0.0);
            if n == 2 {
                for j in 0..g.len() {
                    s += fw[j] * tables[0][i0][j] * tables[1][i1][j];
                }
            } else {
                let i2 = idx % m;
                for j in 0..g.len() {
                    s += fw[j] * tables[0][i0][j] * tables[1][i1][j] * tables[2][i2][j];
                }
            }
            s.norm_sqr()
        })
        .collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    let mut x = [0.0; 3];
    let mut rem = best;
    for a in (0..n).rev() {
        x[a] = axis[rem % m];
        rem /= m;
    }
    refine_peak(f, x)
}

/// Newton ascent of |f-check|^2 from `x`; a step is taken only if it increases the value
/// and stays within a lattice spacing.
pub fn refine_peak(f: &SphereFunction, mut x: [f64; 3]) -> Vec<f64> {
    let n = f.grid.dim;
    let (mut val, _, _) = peak_derivatives(f, &x, n);
    for _ in 0..10 {
        let (_, grad, hess) = peak_derivatives(f, &x, n);
        let Some(step) = solve(&hess, &grad, n) else { break };
        let mut y = x;
        for a in 0..n {
            y[a] -= step[a];
        }
        let (v, _, _) = peak_derivatives(f, &y, n);
        let moved: f64 = step.iter().map(|s| s * s).sum::<f64>().sqrt();
        if v < val || moved > GAUGE_STEP {
            break;
        }
        x = y;
        val = v;
        if moved < 1e-12 {
            break;
        }
    }
    x[..n].to_vec()
}

/// e^{i a . omega} f with a the peak location of |f-check|, so that the result peaks at
/// the origin: (e^{i a.omega} f)-check(x) = f-check(x + a).
pub fn gauge_fix(f: &SphereFunction) -> (SphereFunction, Vec<f64>) {
    let a = peak_location(f);
    (f.modulated(&a), a)
}

/// E restricted to harmonics of degree <= L, evaluated on a space grid through the
/// Funk-Hecke formula E(Y)(x) = lambda_l(|x|) Y(x/|x|). Iterates are stored as
/// coefficients in the orthonormal basis, so the coefficient norm is the L^2 norm.
pub struct BandOperator {
    pub degree: usize,
    pub q: f64,
    basis: Vec<SphereFunction>,
    /// radial family of every basis element
    family: Vec<usize>,
    /// lambda on the radial nodes, per family
    radial: Vec<Vec<C64>>,
    /// basis values on the angular nodes of the space grid
    angular: Vec<Vec<C64>>,
    space: SpaceGrid,
}

/// lambda_l(r) for N = 3: (2pi)^{-3/2} 2pi int_{-1}^1 e^{irz} P_l(z) dz.
/// For N = 2 (order m): (2pi)^{-1} int_0^{2pi} e^{ir cos t + imt} dt.
pub fn funk_hecke(n: usize, l: usize, r: f64) -> C64 {
    if n == 3 {
        let nodes = (r.abs() as usize + l + 40).max(48);
        let (z, w) = crate::numerics::gauss_legendre(nodes);
        let mut s = C64::new(0.0, 0.0);
        for (zi, wi) in z.iter().zip(&w) {
            let (mut p0, mut p1) = (1.0, *zi);
            let pl = if l == 0 {
                1.0
            } else {
                for k in 2..=l {
                    let p2 = ((2 * k - 1) as f64 * zi * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                p1
            };
            s += C64::from_polar(wi * pl, r * zi);
        }
        s * (2.0 * PI).powf(-1.5) * 2.0 * PI
    } else {
        let m = 2 * (r.abs().ceil() as usize + l + 32);
        let mut s = C64::new(0.0, 0.0);
        for k in 0..m {
            let t = 2.0 * PI * k as f64 / m as f64;
            s += C64::from_polar(1.0, r * t.cos() + l as f64 * t);
        }
        s / m as f64
    }
}

impl BandOperator {
    pub fn new(grid: &Arc<SphereGrid>, space: &SpaceGrid, degree: usize) -> Result<Self> {
        if grid.dim != space.dim {
            return Err(SrlError::GridMismatch);
        }
        let n = grid.dim;
        let basis = harmonic_basis(grid, degree)?;
        let hs = harmonics_at(n, degree, &space.angular.nodes)?;
        // N = 3: one family per degree; N = 2: lambda depends on |m| only
        let family: Vec<usize> = hs.iter().map(|h| h.0).collect();
        let radial = (0..=degree)
            .into_par_iter()
            .map(|l| space.radial.iter().map(|&r| funk_hecke(n, l, r)).collect())
            .collect();
        let angular = hs.into_iter().map(|h| h.2).collect();
        Ok(BandOperator { degree, q: Exponent::stein_tomas(n).value(), basis, family, radial, angular, space: space.clone() })
    }

    pub fn coefficients(&self, f: &SphereFunction) -> Result<Vec<C64>> {
        self.basis.iter().map(|b| inner_product(b, f)).collect()
    }

    pub fn function(&self, c: &[C64]) -> SphereFunction {
        let mut values = vec![C64::new(0.0, 0.0); self.basis[0].values.len()];
        for (ck, b) in c.iter().zip(&self.basis) {
            for (v, bv) in values.iter_mut().zip(&b.values) {
                *v += ck * bv;
            }
        }
        SphereFunction { grid: self.basis[0].grid.clone(), values }
    }

    pub fn field(&self, c: &[C64]) -> Vec<C64> {
        let na = self.space.angular.len();
        let mut g = vec![vec![C64::new(0.0, 0.0); na]; self.radial.len()];
        for ((ck, fam), ang) in c.iter().zip(&self.family).zip(&self.angular) {
            for (gv, av) in g[*fam].iter_mut().zip(ang) {
                *gv += ck * av;
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); self.space.num_points()];
        for (ri, row) in out.chunks_mut(na).enumerate() {
            for (f, gf) in g.iter().enumerate() {
                let lam = self.radial[f][ri];
                for (o, gv) in row.iter_mut().zip(gf) {
                    *o += lam * gv;
                }
            }
        }
        out
    }

    /// Coefficients of the projected adjoint P_L E* F with respect to the space-grid weights.
    pub fn adjoint(&self, field: &[C64]) -> Vec<C64> {
        let na = self.space.angular.len();
        let n = self.space.dim as i32;
        let mut h = vec![vec![C64::new(0.0, 0.0); na]; self.radial.len()];
        for (ri, row) in field.chunks(na).enumerate() {
            let wr = self.space.radial_weights[ri] * self.space.radial[ri].powi(n - 1);
            for (f, hf) in h.iter_mut().enumerate() {
                let lam = self.radial[f][ri].conj() * wr;
                for (hv, fv) in hf.iter_mut().zip(row) {
                    *hv += lam * fv;
                }
            }
        }
        self.family
            .iter()
            .zip(&self.angular)
            .map(|(fam, ang)| ang.iter().zip(&h[*fam]).zip(&self.space.angular.weights).map(|((a, b), w)| a.conj() * b * *w).sum())
            .collect()
    }
}

fn coeff_norm(c: &[C64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(c: Vec<C64>) -> Result<Vec<C64>> {
    let n = coeff_norm(&c);
    if n == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    Ok(c.into_iter().map(|z| z / n).collect())
}

struct Evaluated {
    c: Vec<C64>,
    field: Vec<C64>,
    quotient: f64,
    truncated: f64,
    tail_fraction: f64,
}

fn evaluate(op: &BandOperator, c: Vec<C64>) -> Evaluated {
    let field = op.field(&c);
    let (value, tail_fraction) = energy_of_field(&field, &op.space, op.q);
    let quotient = value / coeff_norm(&c).powf(op.q);
    Evaluated { c, field, quotient, truncated: quotient * (1.0 - tail_fraction), tail_fraction }
}

/// Knobs of a single ascent run.
#[derive(Clone, Debug, Serialize)]
pub struct AscentOptions {
    /// Harmonic degree of the search space; `None` picks the largest degree for which
    /// |Ef|^q is integrated exactly by the angular rule of the space grid.
    pub degree: Option<usize>,
    pub tol: f64,
    pub el_tol: f64,
    pub guard: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { degree: None, tol: 1e-9, el_tol: 1e-5, guard: 1e-9 }
    }
}

/// Highest degree D such that the angular rule of `space` integrates harmonics of degree <= D exactly.
fn angular_exactness(space: &SpaceGrid) -> usize {
    match &space.angular.layout {
        SphereLayout::Circle { n } => n - 1,
        SphereLayout::Product { cos_polar, .. } => 2 * cos_polar.len() - 1,
    }
}

/// Degree used by [`ascend`] when none is given.
pub fn default_degree(grid: &SphereGrid, space: &SpaceGrid) -> usize {
    let q = Exponent::stein_tomas(space.dim).value();
    ((angular_exactness(space) as f64 / q).floor() as usize).min(grid.max_degree())
}

/// Fixed-point ascent from f0 (projected to the default harmonic degree).
pub fn ascend(f0: &SphereFunction, max_iters: usize, space: &SpaceGrid) -> Result<AscentTrace> {
    let op = BandOperator::new(&f0.grid, space, default_degree(&f0.grid, space))?;
    ascend_with(&op, f0, max_iters, &AscentOptions::default())
}

pub fn ascend_with(op: &BandOperator, f0: &SphereFunction, max_iters: usize, opts: &AscentOptions) -> Result<AscentTrace> {
    let (centred, a0) = gauge_fix(&f0.normalized()?);
    let mut cur = evaluate(op, normalize(op.coefficients(&centred)?)?);
    let mut trace = AscentTrace {
        iterates: vec![cur.quotient],
        truncated: vec![cur.truncated],
        gauge_shifts: vec![a0],
        el_residual: f64::INFINITY,
        tail_fraction: cur.tail_fraction,
        converged: false,
        damping: 1.0,
        guard_trips: 0,
        degree: op.degree,
        seed: None,
        final_function: op.function(&cur.c),
    };
    let mut beta: f64 = 1.0;
    for _ in 0..max_iters {
        let nl: Vec<C64> = cur.field.iter().map(|z| z * abs_pow(*z, op.q - 2.0)).collect();
        let target = normalize(op.adjoint(&nl))?;
        let el = coeff_norm(&cur.c.iter().zip(&target).map(|(a, b)| a - b).collect::<Vec<_>>());
        trace.el_residual = el;
        let step = if beta == 1.0 { target } else { normalize(cur.c.iter().zip(&target).map(|(a, b)| a * (1.0 - beta) + b * beta).collect())? };
        let next = evaluate(op, step);
        if next.truncated < cur.truncated - opts.guard {
            trace.guard_trips += 1;
            beta *= 0.5;
            if beta < 1.0 / 64.0 {
                return Err(SrlError::Monotonicity { step: trace.iterates.len(), prev: cur.truncated, next: next.truncated });
            }
            continue;
        }
        // Recentre toward the peak. A full shift can lose band-limited mass, so halve it
        // until the trace stays monotone with respect to the previous iterate.
        let f_next = op.function(&next.c);
        let a = refine_peak(&f_next, [0.0; 3]);
        let shift: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut accepted = None;
        if shift > 1e-9 {
            let mut frac = 1.0;
            for _ in 0..8 {
                let part: Vec<f64> = a.iter().map(|v| v * frac).collect();
                let fixed = f_next.modulated(&part);
                let moved = evaluate(op, normalize(op.coefficients(&fixed)?)?);
                if moved.truncated >= cur.truncated - opts.guard {
                    accepted = Some((moved, part));
                    break;
                }
                frac *= 0.5;
            }
        }
        let (next, a) = accepted.unwrap_or_else(|| (next, vec![0.0; a.len()]));
        let delta = next.quotient - cur.quotient;
        trace.iterates.push(next.quotient);
        trace.truncated.push(next.truncated);
        trace.gauge_shifts.push(a);
        trace.tail_fraction = next.tail_fraction;
        cur = next;
        if delta.abs() < opts.tol && el <= opts.el_tol {
            trace.converged = true;
            break;
        }
    }
    trace.damping = beta;
    trace.final_function = op.function(&cur.c);
    Ok(trace)
}

/// Ascent from `cfg.starts` random smooth starts with seeds cfg.seed, cfg.seed + 1, ...
pub fn multistart(cfg: &SearchConfig) -> Result<Vec<AscentTrace>> {
    let grid = cfg.sphere()?;
    let space = cfg.space()?;
    let op = BandOperator::new(&grid, &space, cfg.degree.unwrap_or_else(|| default_degree(&grid, &space)))?;
    (0..cfg.starts)
        .map(|k| {
            let seed = cfg.seed + k as u64;
            let f0 = random_smooth(&grid, seed, cfg.kappa);
            let opts = AscentOptions { degree: cfg.degree, tol: cfg.tol, el_tol: cfg.el_tol, guard: cfg.guard };
            let mut t = ascend_with(&op, &f0, cfg.max_iters, &opts)?;
            t.seed = Some(seed);
            Ok(t)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub lower_bound: f64,
    pub threshold: f64,
    pub margin: f64,
    pub ratio: f64,
    pub benchmark: Option<f64>,
    pub best_seed: Option<u64>,
    pub trusted: bool,
}

/// Ascent lower bound on R_N against the antipodal level c(q) S_{N-1}^G.
pub fn gap_report(cfg: &SearchConfig) -> Result<(GapReport, Vec<AscentTrace>)> {
    let n = cfg.n;
    if n != 2 && n != 3 {
        return Err(SrlError::UnsupportedDimension(n));
    }
    let traces = multistart(cfg)?;
    let best = traces
        .iter()
        .max_by(|a, b| a.final_quotient().total_cmp(&b.final_quotient()))
        .ok_or_else(|| SrlError::Config("no ascent starts".into()))?;
    let d = n - 1;
    let q = Exponent::strichartz(d).value();
    let threshold = c_constant(q) * gaussian_strichartz_constant(d);
    let lower_bound = best.final_quotient();
    let trusted = best.converged && best.tail_fraction < 0.1;
    let report = GapReport {
        n,
        lower_bound,
        threshold,
        margin: lower_bound - threshold,
        ratio: lower_bound / threshold,
        benchmark: (n == 3).then(|| 1.0 / (4.0 * PI * PI)),
        best_seed: best.seed,
        trusted,
    };
    Ok((report, traces))
}

/// <Ef, F> over the truncated space grid versus <f, E*F> on the sphere.
pub fn adjoint_mismatch(f: &SphereFunction, field: &[C64], space: &SpaceGrid) -> Result<f64> {
    let ef = extend_on_space(f, space);
    let lhs: C64 = ef.iter().zip(field).enumerate().map(|(i, (a, b))| b.conj() * a * space.weight(i)).sum();
    let rhs = inner_product(&adjoint_on_space(field, space, &f.grid), f)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(1e-300))
}
