//! Dyadic cubes lifted to caps, the refined Stein-Tomas norm, the cap-to-profile identity
//! and the bilinear / dyadic-sum diagnostics behind it.

use crate::error::{Result, SrlError};
use crate::extension::{extend, prefactor};
use crate::geometry::{abs_pow, Lattice, ProfileFunction, SphereFunction, SphereGrid, SphereLayout};
use crate::numerics::{composite_gl, pairwise_sum, smooth_ramp, uniform_edges, C64};
use crate::strichartz::{spectral_mass_outside, t_of_e, Dispersion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

pub type Rotation = [[f64; 3]; 3];

/// 2^j k + [0, 2^j)^{N-1}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DyadicCube {
    pub level: i32,
    pub corner: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, corner: Vec<i64>) -> Self {
        DyadicCube { level, corner }
    }

    /// The cube of side 2^level containing xi.
    pub fn containing(level: i32, xi: &[f64]) -> Self {
        let s = 2f64.powi(level);
        DyadicCube { level, corner: xi.iter().map(|t| (t / s).floor() as i64).collect() }
    }

    pub fn side(&self) -> f64 {
        2f64.powi(self.level)
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.corner.len() as i32)
    }

    pub fn lower(&self) -> Vec<f64> {
        let s = self.side();
        self.corner.iter().map(|&k| k as f64 * s).collect()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        let s = self.side();
        xi.iter().zip(&self.corner).all(|(t, &k)| (t / s).floor() as i64 == k)
    }

    pub fn parent(&self) -> Self {
        DyadicCube { level: self.level + 1, corner: self.corner.iter().map(|k| k.div_euclid(2)).collect() }
    }

    /// Closures intersect (same level assumed).
    pub fn adjacent(&self, other: &Self) -> bool {
        self.corner.iter().zip(&other.corner).all(|(a, b)| (a - b).abs() <= 1)
    }

    /// Q ~ Q': same side, closures disjoint, parents adjacent.
    pub fn related(&self, other: &Self) -> bool {
        self.level == other.level && !self.adjacent(other) && self.parent().adjacent(&other.parent())
    }

    /// Does the cube meet the open ball |xi| < r?
    pub fn meets_ball(&self, r: f64) -> bool {
        let s = self.side();
        let d2: f64 = self
            .lower()
            .iter()
            .map(|&lo| {
                let hi = lo + s;
                if lo > 0.0 {
                    lo * lo
                } else if hi < 0.0 {
                    hi * hi
                } else {
                    0.0
                }
            })
            .sum();
        d2 < r * r
    }
}

fn mat_vec(r: &Rotation, v: &[f64; 3]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for i in 0..3 {
        o[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    }
    o
}

fn mat_t_vec(r: &Rotation, v: &[f64; 3]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for i in 0..3 {
        o[i] = r[0][i] * v[0] + r[1][i] * v[1] + r[2][i] * v[2];
    }
    o
}

fn mat_mul(a: &Rotation, b: &Rotation) -> Rotation {
    let mut o = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            o[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    o
}

fn north(n: usize) -> [f64; 3] {
    let mut v = [0.0; 3];
    v[n - 1] = 1.0;
    v
}

/// A proper rotation taking the north pole e_N to theta.
pub fn rotation_to(theta: &[f64; 3], n: usize) -> Result<Rotation> {
    match n {
        2 => {
            let (c, s) = (theta[0], theta[1]);
            Ok([[s, c, 0.0], [-c, s, 0.0], [0.0, 0.0, 1.0]])
        }
        3 => {
            let c = theta[2];
            if c < -1.0 + 1e-12 {
                return Ok([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
            }
            // Rodrigues with axis e3 x theta
            let v = [-theta[1], theta[0], 0.0];
            let k = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
            let k2 = mat_mul(&k, &k);
            let mut r = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    r[i][j] = if i == j { 1.0 } else { 0.0 } + k[i][j] + k2[i][j] / (1.0 + c);
                }
            }
            Ok(r)
        }
        _ => Err(SrlError::UnsupportedDimension(n)),
    }
}

/// Caps C(theta_a) = {omega . theta_a > sqrt(1 - eps^2)} covering the sphere, with a smooth
/// partition of unity sampled on a grid.
#[derive(Clone, Debug)]
pub struct CapAtlas {
    pub eps_cap: f64,
    pub directions: Vec<[f64; 3]>,
    pub rotations: Vec<Rotation>,
    /// chi_alpha at the grid nodes
    pub weights: Vec<Vec<f64>>,
    pub grid: Arc<SphereGrid>,
}

/// Fraction of the cap's angular radius on which a bump equals 1.
const CORE: f64 = 0.6;

fn cap_bump(angle: f64, radius: f64) -> f64 {
    smooth_ramp((radius - angle) / ((1.0 - CORE) * radius))
}

fn angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0).acos()
}

impl CapAtlas {
    /// Greedy covering: scan the grid nodes and open a new cap at every node farther than
    /// CORE * radius from all existing centres.
    pub fn new(grid: &Arc<SphereGrid>, eps_cap: f64) -> Result<Self> {
        if !(eps_cap > 0.0 && eps_cap < 1.0) {
            return Err(SrlError::Domain(format!("eps_cap = {eps_cap} must lie in (0, 1)")));
        }
        let radius = eps_cap.asin();
        let n = grid.dim;
        let mut directions = vec![north(n)];
        for w in &grid.nodes {
            if directions.iter().all(|c| angle(c, w) > CORE * radius) {
                directions.push(*w);
            }
        }
        Self::with_directions(grid, eps_cap, directions)
    }

    pub fn with_directions(grid: &Arc<SphereGrid>, eps_cap: f64, directions: Vec<[f64; 3]>) -> Result<Self> {
        let radius = eps_cap.asin();
        let n = grid.dim;
        let rotations = directions.iter().map(|d| rotation_to(d, n)).collect::<Result<Vec<_>>>()?;
        let raw: Vec<Vec<f64>> = directions.iter().map(|c| grid.nodes.iter().map(|w| cap_bump(angle(c, w), radius)).collect()).collect();
        let mut weights = raw.clone();
        for j in 0..grid.len() {
            let s: f64 = raw.iter().map(|r| r[j]).sum();
            if s <= 0.0 {
                return Err(SrlError::Domain(format!("caps do not cover node {j}")));
            }
            for (w, r) in weights.iter_mut().zip(&raw) {
                w[j] = r[j] / s;
            }
        }
        Ok(CapAtlas { eps_cap, directions, rotations, weights, grid: grid.clone() })
    }

    /// The atlas moved by a rotation r: centres r theta_a, frames r R_a.
    pub fn rotated(&self, r: &Rotation) -> Result<Self> {
        let dirs = self.directions.iter().map(|d| mat_vec(r, d)).collect();
        let mut out = Self::with_directions(&self.grid, self.eps_cap, dirs)?;
        out.rotations = self.rotations.iter().map(|ra| mat_mul(r, ra)).collect();
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    /// (P_{theta_a perp} omega in the frame of R_a, omega . theta_a).
    pub fn local(&self, alpha: usize, w: &[f64; 3]) -> (Vec<f64>, f64) {
        let n = self.dim();
        let l = mat_t_vec(&self.rotations[alpha], w);
        (l[..n - 1].to_vec(), l[n - 1])
    }

    /// Largest deviation of sum_a chi_a from 1 over the grid.
    pub fn partition_defect(&self) -> f64 {
        (0..self.grid.len()).map(|j| (self.weights.iter().map(|w| w[j]).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest chi_a at a node outside C(theta_a); zero by construction.
    pub fn leakage(&self) -> f64 {
        let h = (1.0 - self.eps_cap * self.eps_cap).sqrt();
        let mut worst: f64 = 0.0;
        for (a, w) in self.weights.iter().enumerate() {
            for (j, node) in self.grid.nodes.iter().enumerate() {
                let c = &self.directions[a];
                if c[0] * node[0] + c[1] * node[1] + c[2] * node[2] <= h {
                    worst = worst.max(w[j]);
                }
            }
        }
        worst
    }
}

/// L_{theta_a}(Q): omega with P_{theta perp} omega in Q and omega . theta > 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftedRegion {
    pub cube: DyadicCube,
    pub alpha: usize,
}

impl LiftedRegion {
    pub fn contains(&self, atlas: &CapAtlas, w: &[f64; 3]) -> bool {
        let (xi, h) = atlas.local(self.alpha, w);
        h > 0.0 && self.cube.contains(&xi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinedNormConfig {
    /// sup over x is sampled on the lattice x_step Z^N inside |x| <= x_half
    pub x_half: f64,
    pub x_step: f64,
    pub j_min: i32,
    pub j_max: i32,
}

/// Typical spacing between neighbouring grid nodes.
fn grid_spacing(grid: &SphereGrid) -> f64 {
    match &grid.layout {
        SphereLayout::Circle { n } => 2.0 * PI / *n as f64,
        SphereLayout::Product { cos_polar, .. } => PI / cos_polar.len() as f64,
    }
}

impl RefinedNormConfig {
    /// Cube levels from one above the grid spacing to the first side >= 2 eps_cap;
    /// x window 64 for N = 2 and 16 for N = 3.
    pub fn for_atlas(atlas: &CapAtlas) -> Self {
        let j_min = grid_spacing(&atlas.grid).log2().floor() as i32 + 1;
        let j_max = (2.0 * atlas.eps_cap).log2().ceil() as i32;
        RefinedNormConfig { x_half: if atlas.dim() == 2 { 64.0 } else { 16.0 }, x_step: PI / 4.0, j_min, j_max: j_max.max(j_min) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeRef {
    pub level: i32,
    pub corner: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinedNorm {
    /// sampled sup_a sup_Q |Q|^{-1/2} max_x |(1_L chi_a f)-check(x)|
    pub value: f64,
    /// value plus the gradient-bound correction for the sampling spacing
    pub upper: f64,
    pub alpha: usize,
    pub cube: CubeRef,
    pub x_argmax: Vec<f64>,
    pub resolution_floor_hit: bool,
}

impl RefinedNorm {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Points of the sampling lattice inside the ball, with their per-axis indices.
fn x_samples(n: usize, half: f64, step: f64) -> (Vec<f64>, Vec<[usize; 3]>) {
    let m = (half / step).floor() as i64;
    let axis: Vec<f64> = (-m..=m).map(|k| k as f64 * step).collect();
    let len = axis.len();
    let mut idx = Vec::new();
    for i in 0..len {
        for j in 0..len {
            if n == 2 {
                if axis[i].hypot(axis[j]) <= half {
                    idx.push([i, j, 0]);
                }
            } else {
                for k in 0..len {
                    if (axis[i] * axis[i] + axis[j] * axis[j] + axis[k] * axis[k]).sqrt() <= half {
                        idx.push([i, j, k]);
                    }
                }
            }
        }
    }
    (axis, idx)
}

/// Nodes of cap alpha grouped by dyadic cube at each level, in lexicographic cube order.
fn cube_groups(atlas: &CapAtlas, alpha: usize, level: i32) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (j, w) in atlas.grid.nodes.iter().enumerate() {
        if atlas.weights[alpha][j] <= 0.0 {
            continue;
        }
        let (xi, h) = atlas.local(alpha, w);
        if h <= 0.0 {
            continue;
        }
        groups.entry(DyadicCube::containing(level, &xi).corner).or_default().push(j);
    }
    groups
}

struct Candidate {
    value: f64,
    upper: f64,
    alpha: usize,
    level: i32,
    corner: Vec<i64>,
    x: usize,
    nodes: usize,
}

/// Refined Stein-Tomas norm over the finite family of caps, cubes and sample points.
pub fn refined_norm(f: &SphereFunction, atlas: &CapAtlas, cfg: &RefinedNormConfig) -> Result<RefinedNorm> {
    if !Arc::ptr_eq(&f.grid, &atlas.grid) && *f.grid != *atlas.grid {
        return Err(SrlError::GridMismatch);
    }
    if cfg.j_min > cfg.j_max || !(cfg.x_step > 0.0) || !(cfg.x_half >= 0.0) {
        return Err(SrlError::Domain("bad refined-norm window".into()));
    }
    let n = atlas.dim();
    let g = &atlas.grid;
    let pre = prefactor(n);
    let (axis, xs) = x_samples(n, cfg.x_half, cfg.x_step);
    // Bernstein: |grad g-check| <= (2 pi)^{-N/2} ||g||_1 and every x is within step sqrt(N)/2 of a sample
    let reach = cfg.x_step * (n as f64).sqrt() / 2.0;
    // Cheap lower bound from x = 0; a cube whose L^1 bound falls below it can neither win nor tie.
    let groups: Vec<Vec<(i32, Vec<i64>, Vec<usize>)>> = (0..atlas.len())
        .into_par_iter()
        .map(|alpha| (cfg.j_min..=cfg.j_max).flat_map(|level| cube_groups(atlas, alpha, level).into_iter().map(move |(c, v)| (level, c, v))).collect())
        .collect();
    let floor = groups
        .iter()
        .enumerate()
        .flat_map(|(alpha, gs)| {
            gs.iter().map(move |(level, _, nodes)| {
                let vol = 2f64.powi(level * (n as i32 - 1));
                let s: C64 = nodes.iter().map(|&j| f.values[j] * (atlas.weights[alpha][j] * g.weights[j])).sum();
                pre * s.norm() / vol.sqrt()
            })
        })
        .fold(0.0, f64::max);
    let per_alpha: Vec<Option<Candidate>> = groups
        .par_iter()
        .enumerate()
        .map(|(alpha, gs)| {
            let mut best: Option<Candidate> = None;
            for (level, corner, nodes) in gs {
                let vol = 2f64.powi(level * (n as i32 - 1));
                let vals: Vec<C64> = nodes.iter().map(|&j| f.values[j] * (atlas.weights[alpha][j] * g.weights[j])).collect();
                let l1: f64 = vals.iter().map(|v| v.norm()).sum();
                let scale = pre / vol.sqrt();
                if l1 == 0.0 || scale * l1 < floor {
                    continue;
                }
                let tables: Vec<Vec<Vec<C64>>> = (0..n)
                    .map(|a| nodes.iter().map(|&j| axis.iter().map(|&s| C64::from_polar(1.0, s * g.nodes[j][a])).collect()).collect())
                    .collect();
                let mut mx = 0.0;
                let mut arg = 0;
                for (xi, ix) in xs.iter().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    if n == 3 {
                        for (k, v) in vals.iter().enumerate() {
                            s += v * tables[0][k][ix[0]] * tables[1][k][ix[1]] * tables[2][k][ix[2]];
                        }
                    } else {
                        for (k, v) in vals.iter().enumerate() {
                            s += v * tables[0][k][ix[0]] * tables[1][k][ix[1]];
                        }
                    }
                    let m = s.norm();
                    if m > mx {
                        mx = m;
                        arg = xi;
                    }
                }
                let value = scale * mx;
                let upper = (scale * (mx + reach * l1)).min(scale * l1);
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(Candidate { value, upper, alpha, level: *level, corner: corner.clone(), x: arg, nodes: nodes.len() });
                }
            }
            best
        })
        .collect();
    let mut best: Option<Candidate> = None;
    let mut upper: f64 = 0.0;
    for c in per_alpha.into_iter().flatten() {
        upper = upper.max(c.upper);
        if best.as_ref().is_none_or(|b| c.value > b.value) {
            best = Some(c);
        }
    }
    let b = best.ok_or(SrlError::ZeroNorm)?;
    let ix = xs[b.x];
    Ok(RefinedNorm {
        value: b.value,
        upper: upper.max(b.value),
        alpha: b.alpha,
        cube: CubeRef { level: b.level, corner: b.corner },
        x_argmax: (0..n).map(|a| axis[ix[a]]).collect(),
        resolution_floor_hit: b.level == cfg.j_min && b.nodes == 1,
    })
}

/// C_N = (2 pi)^{-N/2} sup_{a,Q} |Q|^{-1/2} ||1_L chi_a||_2 over the same cube family, so that
/// refined_norm(f) <= C_N ||f|| for every f.
pub fn refined_norm_bound(atlas: &CapAtlas, cfg: &RefinedNormConfig) -> f64 {
    let n = atlas.dim();
    let g = &atlas.grid;
    let mut best: f64 = 0.0;
    for alpha in 0..atlas.len() {
        for level in cfg.j_min..=cfg.j_max {
            let vol = 2f64.powi(level * (n as i32 - 1));
            for nodes in cube_groups(atlas, alpha, level).values() {
                let l2: f64 = nodes.iter().map(|&j| atlas.weights[alpha][j].powi(2) * g.weights[j]).sum::<f64>().sqrt();
                best = best.max(l2 / vol.sqrt());
            }
        }
    }
    prefactor(n) * best
}

/// ||f-check||_q / (refined^{1 - sigma} ||f||^sigma) for each (f, ||f-check||_q) pair.
pub fn refined_inequality_profile(family: &[(SphereFunction, f64)], atlas: &CapAtlas, cfg: &RefinedNormConfig, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(SrlError::Domain(format!("sigma = {sigma} must lie in (0, 1)")));
    }
    family
        .iter()
        .map(|(f, lq)| {
            let norm = f.norm();
            if norm == 0.0 {
                return Err(SrlError::ZeroNorm);
            }
            let r = refined_norm(f, atlas, cfg)?;
            Ok(lq / (r.value.powf(1.0 - sigma) * norm.powf(sigma)))
        })
        .collect()
}

// ---------------------------------------------------------------- cap-to-profile identity

#[derive(Clone, Debug, Serialize)]
pub struct CapIdentityConfig {
    pub n: usize,
    pub eps_cap: f64,
    /// resolution of the sphere grid used for f-check
    pub sphere_resolution: usize,
    /// Gauss-Legendre panels per axis of [-eps, eps]^{N-1} for the profile side
    pub xi_panels: usize,
    pub samples: usize,
    pub sample_radius: f64,
    pub seed: u64,
    /// the cap sits at R(north) and the identity is tested at R^{-1} x
    pub rotation: Option<Rotation>,
}

impl CapIdentityConfig {
    pub fn new(n: usize) -> Self {
        CapIdentityConfig {
            n,
            eps_cap: 0.3,
            sphere_resolution: if n == 2 { 1024 } else { 480 },
            xi_panels: 32,
            samples: 200,
            sample_radius: 10.0,
            seed: 7,
            rotation: None,
        }
    }
}

/// Relative max residual of f-check(x) = (2pi)^{-1/2} e^{i x_N} (e^{-i x_N T(-Delta)} psi)(x')
/// with psi-hat(xi) = f(xi, sqrt(1 - xi^2)) / sqrt(1 - xi^2), for f supported in the north cap.
/// The left side is the sphere quadrature of f (moved by `rotation` if given), the right side
/// a Cartesian quadrature in xi.
pub fn cap_profile_identity_residual(f: &(dyn Fn(&[f64]) -> C64 + Sync), cfg: &CapIdentityConfig) -> Result<f64> {
    let n = cfg.n;
    let d = n.checked_sub(1).filter(|d| *d == 1 || *d == 2).ok_or(SrlError::UnsupportedDimension(n))?;
    let grid = crate::geometry::make_sphere_grid(n, cfg.sphere_resolution)?;
    let rot = cfg.rotation.unwrap_or([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    let h = (1.0 - cfg.eps_cap * cfg.eps_cap).sqrt();
    // f moved to the rotated cap: f_R(omega) = f(R^T omega)
    let local = |w: &[f64]| {
        let mut p = [0.0; 3];
        p[..n].copy_from_slice(&w[..n]);
        mat_t_vec(&rot, &p)
    };
    let support_violation = grid
        .nodes
        .iter()
        .map(|w| {
            let l = local(w);
            if l[n - 1] <= h {
                f(&l[..n]).norm()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    let moved = SphereFunction::from_fn(&grid, |w| f(&local(w)[..n]));
    if support_violation > 0.0 {
        return Err(SrlError::Domain(format!("f is {support_violation:e} outside the north cap")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<[f64; 3]> = (0..cfg.samples)
        .map(|_| {
            let mut x = [0.0; 3];
            for v in x.iter_mut().take(n) {
                *v = rng.gen_range(-cfg.sample_radius..cfg.sample_radius);
            }
            x
        })
        .collect();
    // profile side: nodes in [-eps, eps]^d
    let (t, wt) = composite_gl(&uniform_edges(-cfg.eps_cap, cfg.eps_cap, cfg.xi_panels), 8);
    let mut nodes: Vec<(Vec<f64>, f64, C64)> = Vec::new();
    let mut push = |xi: Vec<f64>, w: f64| {
        let e: f64 = xi.iter().map(|v| v * v).sum();
        if e >= 1.0 {
            return;
        }
        let root = (1.0 - e).sqrt();
        let mut p = xi.clone();
        p.push(root);
        let v = f(&p);
        if v != C64::new(0.0, 0.0) {
            nodes.push((xi, t_of_e(e), v / root * w));
        }
    };
    if d == 1 {
        for (a, wa) in t.iter().zip(&wt) {
            push(vec![*a], *wa);
        }
    } else {
        for (a, wa) in t.iter().zip(&wt) {
            for (b, wb) in t.iter().zip(&wt) {
                push(vec![*a, *b], wa * wb);
            }
        }
    }
    let pre_d = (2.0 * PI).powf(-0.5 * d as f64);
    let worst: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| {
            let lhs = extend(&moved, x);
            let y = mat_t_vec(&rot, x);
            let xn = y[n - 1];
            let mut s = C64::new(0.0, 0.0);
            for (xi, te, v) in &nodes {
                let ph: f64 = xi.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - xn * te;
                s += v * C64::from_polar(1.0, ph);
            }
            let rhs = C64::from_polar((2.0 * PI).powf(-0.5), xn) * s * pre_d;
            ((lhs - rhs).norm(), lhs.norm())
        })
        .collect();
    let scale = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(worst.iter().map(|w| w.0).fold(0.0, f64::max) / scale)
}

// ---------------------------------------------------------------- appendix diagnostics

/// min(q/2, (q/2)') for q > 2.
pub fn q_star(q: f64) -> Result<f64> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(SrlError::Domain(format!("q_star needs q > 2, got {q}")));
    }
    let h = q / 2.0;
    Ok(h.min(h / (h - 1.0)))
}

/// Profile with Fourier transform a sum of Gaussians centred in the ball of radius eps/2
/// and narrow enough that the mass outside radius eps is negligible.
pub fn random_band_limited(d: usize, eps: f64, terms: usize, seed: u64) -> Result<ProfileFunction> {
    if !(1..=2).contains(&d) || !(eps > 0.0) {
        return Err(SrlError::Domain("random_band_limited needs d in {1, 2} and eps > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = 12.0 / eps;
    let spread = 2.0 * width;
    let comps: Vec<(Vec<f64>, Vec<f64>, C64)> = (0..terms)
        .map(|_| {
            let centre: Vec<f64> = loop {
                let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5 * eps..0.5 * eps)).collect();
                if c.iter().map(|v| v * v).sum::<f64>() < 0.25 * eps * eps {
                    break c;
                }
            };
            let shift: Vec<f64> = (0..d).map(|_| rng.gen_range(-spread..spread)).collect();
            let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (centre, shift, amp)
        })
        .collect();
    let h = 0.5 / eps;
    let half = ((spread + 8.0 * width) / h).ceil() as usize;
    let lat = Lattice::centered(d, h, half);
    Ok(ProfileFunction::from_fn(lat, |x| {
        comps
            .iter()
            .map(|(c, s, a)| {
                let r2: f64 = x.iter().zip(s).map(|(u, v)| (u - v) * (u - v)).sum();
                let ph: f64 = x.iter().zip(c).map(|(u, v)| u * v).sum();
                a * C64::from_polar((-0.5 * r2 / (width * width)).exp(), ph)
            })
            .sum()
    }))
}

#[derive(Clone, Debug)]
pub struct BilinearConfig {
    /// frequency support radius of psi
    pub eps: f64,
    pub dispersion: Dispersion,
    /// space margin around the wave packets, in units of the inverse cube side
    pub margin: f64,
    /// rescaled sample spacings (x in units of 1/side, t in units of 1/side^2)
    pub dx: f64,
    pub dt: f64,
    /// width of the ramp of the frequency window, as a fraction of the side
    pub ramp: f64,
}

impl BilinearConfig {
    pub fn new(eps: f64, dispersion: Dispersion) -> Self {
        BilinearConfig { eps, dispersion, margin: 16.0, dx: 0.25, dt: 0.1, ramp: 0.25 }
    }
}

fn window(u: f64, ramp: f64) -> f64 {
    smooth_ramp(u / ramp) * smooth_ramp((1.0 - u) / ramp)
}

/// ||Psi_Q Psi_Q'||_{L^p_{t,x}} / (|Q|^{1 - (d+2)/(p d)} ||psi_Q|| ||psi_Q'||), where psi_Q is
/// psi localized to Q by a smooth window supported in Q and Psi_Q its evolution.
pub fn bilinear_ratio(psi: &ProfileFunction, q1: &DyadicCube, q2: &DyadicCube, p: f64, cfg: &BilinearConfig) -> Result<f64> {
    let d = psi.dim();
    if d != 1 {
        return Err(SrlError::UnsupportedDimension(d + 1));
    }
    if q1.corner.len() != d || q2.corner.len() != d {
        return Err(SrlError::Domain("cube dimension differs from the profile".into()));
    }
    if !q1.related(q2) {
        return Err(SrlError::Domain("cubes are not related (same side, disjoint, adjacent parents)".into()));
    }
    let lo = (d as f64 + 3.0) / (d as f64 + 1.0);
    let hi = (d as f64 + 2.0) / d as f64;
    if !(p > lo && p < hi) {
        return Err(SrlError::Domain(format!("p = {p} outside ({lo}, {hi})")));
    }
    for q in [q1, q2] {
        let far = q.lower().iter().map(|l| l.abs().max((l + q.side()).abs())).fold(0.0, f64::max);
        if far > cfg.eps {
            return Err(SrlError::FrequencySupport(far, cfg.eps));
        }
    }
    if let Some(s) = cfg.dispersion.support() {
        if cfg.eps > s {
            return Err(SrlError::FrequencySupport(cfg.eps, s));
        }
    }
    let outside = spectral_mass_outside(psi, cfg.eps);
    if outside > 1e-8 {
        return Err(SrlError::FrequencySupport(outside, cfg.eps));
    }
    let s = q1.side();
    // rescaled frequency zeta = xi / s; the window lives on k + [0, 1]
    let (eta, weta) = composite_gl(&uniform_edges(0.0, 1.0, 16), 8);
    let mut packets = Vec::new();
    for q in [q1, q2] {
        let k = q.corner[0] as f64;
        let zeta: Vec<f64> = eta.iter().map(|e| k + e).collect();
        let spec: Vec<C64> = zeta.iter().zip(&eta).map(|(z, e)| psi.fourier_at(&[s * z]) * window(*e, cfg.ramp)).collect();
        let amp: Vec<C64> = spec.iter().zip(&weta).map(|(v, w)| v * *w).collect();
        let norm2: f64 = spec.iter().zip(&weta).map(|(v, w)| v.norm_sqr() * w).sum();
        // ||psi_Q||^2 = s int |psi-hat(s zeta) window|^2 d zeta
        let phase: Vec<f64> = zeta.iter().map(|z| cfg.dispersion.phase(&[s * z]) / (s * s)).collect();
        let vel: Vec<f64> = zeta
            .iter()
            .map(|z| {
                let h = 1e-6;
                (cfg.dispersion.phase(&[s * (z + h)]) - cfg.dispersion.phase(&[s * (z - h)])) / (2.0 * h * s)
            })
            .collect();
        packets.push((zeta, amp, phase, (s * norm2).sqrt(), vel));
    }
    if packets.iter().any(|p| p.3 == 0.0) {
        return Err(SrlError::ZeroNorm);
    }
    // spatial extent of psi, rescaled
    let extent = s * psi.effective_radius(1e-6);
    let m = cfg.margin + extent;
    let vmin = packets.iter().flat_map(|p| p.4.iter()).cloned().fold(f64::INFINITY, f64::min);
    let vmax = packets.iter().flat_map(|p| p.4.iter()).cloned().fold(f64::NEG_INFINITY, f64::max);
    let t_half = 2.5 * m;
    let nt = (t_half / cfg.dt).ceil() as i64;
    let pre = (2.0 * PI).powf(-0.5);
    let slices: Vec<f64> = (-nt..=nt)
        .into_par_iter()
        .map(|it| {
            let t = it as f64 * cfg.dt;
            let (a, b) = (vmin * t, vmax * t);
            let (x0, x1) = (a.min(b) - m, a.max(b) + m);
            let nx = ((x1 - x0) / cfg.dx).ceil() as usize;
            // phasor recurrence in x: cur_k = rot_k e^{i x zeta_k}
            let mut cur: Vec<Vec<C64>> = packets
                .iter()
                .map(|p| p.1.iter().zip(&p.2).zip(&p.0).map(|((v, ph), z)| v * C64::from_polar(1.0, x0 * z - t * ph)).collect())
                .collect();
            let step: Vec<Vec<C64>> = packets.iter().map(|p| p.0.iter().map(|z| C64::from_polar(1.0, cfg.dx * z)).collect()).collect();
            let mut acc = Vec::with_capacity(nx + 1);
            for _ in 0..=nx {
                let mut prod = 1.0;
                for (c, st) in cur.iter_mut().zip(&step) {
                    let mut u = C64::new(0.0, 0.0);
                    for (ck, sk) in c.iter_mut().zip(st) {
                        u += *ck;
                        *ck *= sk;
                    }
                    prod *= u.norm() * pre * s;
                }
                acc.push(prod.powf(p));
            }
            pairwise_sum(&acc) * cfg.dx
        })
        .collect();
    // dx dt = s^{-(d+2)} dX dT
    let integral = pairwise_sum(&slices) * cfg.dt * s.powi(-(d as i32 + 2));
    let num = integral.powf(1.0 / p);
    let vol = q1.volume();
    Ok(num / (vol.powf(1.0 - (d as f64 + 2.0) / (p * d as f64)) * packets[0].3 * packets[1].3))
}

/// (sum_Q |Q|^{-nu/mu'} ||f||_{L^1(Q)}^nu)^{1/nu} / ||f||_{L^mu}, cubes of side 2^j with
/// j in [j_lo, j_hi] meeting the support of f.
pub fn dyadic_sum_ratio(f: &ProfileFunction, mu: f64, nu: f64, j_lo: i32, j_hi: i32) -> Result<f64> {
    if !(mu > 1.0 && nu > mu) {
        return Err(SrlError::Domain(format!("need 1 < mu < nu, got mu = {mu}, nu = {nu}")));
    }
    if j_lo > j_hi {
        return Err(SrlError::Domain("empty dyadic range".into()));
    }
    let d = f.dim();
    let h = f.lattice.spacing;
    if 2f64.powi(j_lo) < 4.0 * h {
        return Err(SrlError::Domain(format!("cubes of side 2^{j_lo} are below the lattice resolution {h}")));
    }
    let cell = h.powi(d as i32);
    let mu_prime = mu / (mu - 1.0);
    let mut total = 0.0;
    for j in j_lo..=j_hi {
        let mut sums: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (i, v) in f.values.iter().enumerate() {
            if v.norm() > 0.0 {
                let c = DyadicCube::containing(j, &f.lattice.point(i));
                *sums.entry(c.corner).or_default() += v.norm() * cell;
            }
        }
        let vol = 2f64.powi(j * d as i32);
        let terms: Vec<f64> = sums.values().map(|l1| vol.powf(-nu / mu_prime) * l1.powf(nu)).collect();
        total += pairwise_sum(&terms);
    }
    let lmu: Vec<f64> = f.values.iter().map(|v| abs_pow(*v, mu)).collect();
    let norm = (cell * pairwise_sum(&lmu)).powf(1.0 / mu);
    if norm == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    Ok(total.powf(1.0 / nu) / norm)
}
