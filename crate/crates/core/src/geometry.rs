//! Grids and function containers: the sphere, truncated Euclidean space, and profile lattices.

use crate::error::{Result, SrlError};
use crate::numerics::{composite_gl, gauss_legendre, least_squares, pairwise_sum, uniform_edges, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Exact rational exponent, converted to floating point only when evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponent {
    pub num: i64,
    pub den: i64,
}

impl Exponent {
    pub fn new(num: i64, den: i64) -> Self {
        let g = gcd(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Exponent { num: s * num / g, den: s * den / g }
    }
    /// Stein-Tomas exponent 2(N+1)/(N-1).
    pub fn stein_tomas(n: usize) -> Self {
        Exponent::new(2 * (n as i64 + 1), n as i64 - 1)
    }
    /// Strichartz exponent 2 + 4/d.
    pub fn strichartz(d: usize) -> Self {
        Exponent::new(2 * d as i64 + 4, d as i64)
    }
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn abs_pow(z: C64, q: f64) -> f64 {
    let m2 = z.norm_sqr();
    if q == 4.0 {
        m2 * m2
    } else if q == 6.0 {
        m2 * m2 * m2
    } else if q == 2.0 {
        m2
    } else {
        m2.powf(0.5 * q)
    }
}

// ---------------------------------------------------------------- sphere

#[derive(Clone, Debug, PartialEq)]
pub enum SphereLayout {
    /// `n` equally spaced points on the circle, angles 2pi(k + 1/2)/n.
    Circle { n: usize },
    /// Gauss-Legendre in cos(polar) times uniform azimuth; node index = i * n_azimuth + k.
    Product { cos_polar: Vec<f64>, n_azimuth: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub dim: usize,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub layout: SphereLayout,
}

#[derive(Serialize)]
struct SphereGridDoc<'a> {
    kind: &'a str,
    #[serde(rename = "N")]
    n: usize,
    nodes: Vec<Vec<f64>>,
    weights: &'a [f64],
}

/// Product rule on the circle (N = 2) or on S^2 (N = 3).
pub fn make_sphere_grid(n: usize, resolution: usize) -> Result<Arc<SphereGrid>> {
    if resolution < 8 {
        return Err(SrlError::ResolutionTooSmall(resolution, 8));
    }
    match n {
        2 => {
            let m = resolution;
            let nodes = (0..m)
                .map(|k| {
                    let a = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                    [a.cos(), a.sin(), 0.0]
                })
                .collect();
            Ok(Arc::new(SphereGrid {
                dim: 2,
                nodes,
                weights: vec![2.0 * PI / m as f64; m],
                layout: SphereLayout::Circle { n: m },
            }))
        }
        3 => {
            let (z, wz) = gauss_legendre(resolution);
            let na = 2 * resolution;
            let mut nodes = Vec::with_capacity(resolution * na);
            let mut weights = Vec::with_capacity(resolution * na);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).max(0.0).sqrt();
                for k in 0..na {
                    let a = 2.0 * PI * (k as f64 + 0.5) / na as f64;
                    nodes.push([s * a.cos(), s * a.sin(), *zi]);
                    weights.push(wi * 2.0 * PI / na as f64);
                }
            }
            Ok(Arc::new(SphereGrid { dim: 3, nodes, weights, layout: SphereLayout::Product { cos_polar: z, n_azimuth: na } }))
        }
        _ => Err(SrlError::UnsupportedDimension(n)),
    }
}

impl SphereGrid {
    /// Largest harmonic degree for which [`SphereFunction::band_limited`] is an exact
    /// orthogonal projection on this grid.
    pub fn max_degree(&self) -> usize {
        match &self.layout {
            SphereLayout::Circle { n } => (n - 1) / 2,
            SphereLayout::Product { cos_polar, n_azimuth } => (cos_polar.len() - 1).min((n_azimuth - 1) / 2),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
    /// Last coordinate of node j.
    pub fn last(&self, j: usize) -> f64 {
        self.nodes[j][self.dim - 1]
    }
    pub fn to_json(&self) -> serde_json::Value {
        let nodes = self.nodes.iter().map(|p| p[..self.dim].to_vec()).collect();
        let kind = match self.layout {
            SphereLayout::Circle { .. } => "circle_uniform",
            SphereLayout::Product { .. } => "gauss_legendre_azimuth",
        };
        serde_json::to_value(SphereGridDoc { kind, n: self.dim, nodes, weights: &self.weights }).unwrap()
    }

    /// Linear (N = 2) or bilinear-in-(cos polar, azimuth) (N = 3) interpolation of node values;
    /// beyond the outermost rings a first-order fit through the pole.
    pub fn interpolate(&self, values: &[C64], w: [f64; 3]) -> C64 {
        match &self.layout {
            SphereLayout::Circle { n } => {
                let n = *n;
                let a = w[1].atan2(w[0]).rem_euclid(2.0 * PI);
                let s = a * n as f64 / (2.0 * PI) - 0.5;
                let i0 = s.floor();
                let t = s - i0;
                let i = (i0 as i64).rem_euclid(n as i64) as usize;
                values[i] * (1.0 - t) + values[(i + 1) % n] * t
            }
            SphereLayout::Product { cos_polar, n_azimuth } => {
                let na = *n_azimuth;
                let z = w[2].clamp(-1.0, 1.0);
                let a = w[1].atan2(w[0]).rem_euclid(2.0 * PI);
                let s = a * na as f64 / (2.0 * PI) - 0.5;
                let k0f = s.floor();
                let ta = s - k0f;
                let k0 = (k0f as i64).rem_euclid(na as i64) as usize;
                let k1 = (k0 + 1) % na;
                let np = cos_polar.len();
                let along = |i: usize| values[i * na + k0] * (1.0 - ta) + values[i * na + k1] * ta;
                // Inside a polar cap the ring's modes m = 0, +-1 give the linear part through the pole.
                let cap = |i: usize| {
                    let sr = (1.0 - cos_polar[i] * cos_polar[i]).sqrt();
                    let sw = (1.0 - z * z).max(0.0).sqrt();
                    let mut c = [C64::new(0.0, 0.0); 3];
                    for k in 0..na {
                        let ph = 2.0 * PI * (k as f64 + 0.5) / na as f64;
                        let v = values[i * na + k];
                        c[0] += v;
                        c[1] += v * C64::from_polar(1.0, -ph);
                        c[2] += v * C64::from_polar(1.0, ph);
                    }
                    let r = sw / sr / na as f64;
                    c[0] / na as f64 + (c[1] * C64::from_polar(1.0, a) + c[2] * C64::from_polar(1.0, -a)) * r
                };
                if z <= cos_polar[0] {
                    return cap(0);
                }
                if z >= cos_polar[np - 1] {
                    return cap(np - 1);
                }
                let i = cos_polar.partition_point(|&c| c <= z) - 1;
                let tz = (z - cos_polar[i]) / (cos_polar[i + 1] - cos_polar[i]);
                along(i) * (1.0 - tz) + along(i + 1) * tz
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SphereFunction {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<C64>,
}

impl SphereFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SrlError::GridMismatch);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SrlError::Domain("non-finite sphere value".into()));
        }
        Ok(SphereFunction { grid, values })
    }

    pub fn from_fn(grid: &Arc<SphereGrid>, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = grid.nodes.iter().map(|p| f(&p[..grid.dim])).collect();
        SphereFunction { grid: grid.clone(), values }
    }

    pub fn constant(grid: &Arc<SphereGrid>, c: f64) -> Self {
        SphereFunction { grid: grid.clone(), values: vec![C64::new(c, 0.0); grid.len()] }
    }

    pub fn same_grid(&self, other: &SphereFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn norm(&self) -> f64 {
        let v: Vec<f64> = self.values.iter().zip(&self.grid.weights).map(|(f, w)| w * f.norm_sqr()).collect();
        pairwise_sum(&v).sqrt()
    }

    pub fn scaled(&self, c: C64) -> Self {
        SphereFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SrlError::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Multiply by e^{i a . omega}.
    pub fn modulated(&self, a: &[f64]) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.grid.nodes)
            .map(|(v, p)| {
                let ph: f64 = a.iter().zip(p.iter()).map(|(x, y)| x * y).sum();
                v * C64::from_polar(1.0, ph)
            })
            .collect();
        SphereFunction { grid: self.grid.clone(), values }
    }

    /// Orthogonal projection onto spherical harmonics (circle: Fourier modes) of degree <= l.
    pub fn band_limited(&self, l: usize) -> Result<Self> {
        if l > self.grid.max_degree() {
            return Err(SrlError::ResolutionTooSmall(self.grid.max_degree(), l));
        }
        let values = match &self.grid.layout {
            SphereLayout::Circle { n } => {
                let ang: Vec<f64> = (0..*n).map(|k| 2.0 * PI * (k as f64 + 0.5) / *n as f64).collect();
                let mut out = vec![C64::new(0.0, 0.0); *n];
                for m in -(l as i64)..=(l as i64) {
                    let c: C64 = (0..*n).map(|k| self.values[k] * C64::from_polar(1.0, -(m as f64) * ang[k])).sum::<C64>() / *n as f64;
                    for k in 0..*n {
                        out[k] += c * C64::from_polar(1.0, m as f64 * ang[k]);
                    }
                }
                out
            }
            SphereLayout::Product { cos_polar, n_azimuth } => {
                let (nz, na) = (cos_polar.len(), *n_azimuth);
                let (_, wz) = gauss_legendre(nz);
                let ang: Vec<f64> = (0..na).map(|k| 2.0 * PI * (k as f64 + 0.5) / na as f64).collect();
                let mut out = vec![C64::new(0.0, 0.0); nz * na];
                for m in -(l as i64)..=(l as i64) {
                    let ma = m.unsigned_abs() as usize;
                    // azimuthal coefficient on every polar ring
                    let ring: Vec<C64> = (0..nz)
                        .map(|i| (0..na).map(|k| self.values[i * na + k] * C64::from_polar(1.0, -(m as f64) * ang[k])).sum::<C64>() / na as f64)
                        .collect();
                    let leg: Vec<Vec<f64>> = cos_polar.iter().map(|&z| normalized_legendre(l, ma, z)).collect();
                    let mut proj = vec![C64::new(0.0, 0.0); nz];
                    for deg in ma..=l {
                        let c: C64 = (0..nz).map(|i| ring[i] * (wz[i] * leg[i][deg - ma])).sum();
                        for i in 0..nz {
                            proj[i] += c * leg[i][deg - ma];
                        }
                    }
                    for i in 0..nz {
                        for k in 0..na {
                            out[i * na + k] += proj[i] * C64::from_polar(1.0, m as f64 * ang[k]);
                        }
                    }
                }
                out
            }
        };
        Ok(SphereFunction { grid: self.grid.clone(), values })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid.to_json(),
            "re": self.values.iter().map(|v| v.re).collect::<Vec<_>>(),
            "im": self.values.iter().map(|v| v.im).collect::<Vec<_>>(),
        })
    }
}

/// Orthonormal harmonics of degree <= l at unit vectors: e^{i m theta}/sqrt(2 pi) for N = 2
/// (order 0, 1, -1, 2, -2, ...), normalized Y_lm for N = 3 (by degree, then m).
/// Returns (degree, m, values) per harmonic.
pub fn harmonics_at(dim: usize, l: usize, dirs: &[[f64; 3]]) -> Result<Vec<(usize, i64, Vec<C64>)>> {
    let mut out = Vec::new();
    match dim {
        2 => {
            for k in 0..=2 * l as i64 {
                let m = if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 };
                let v = dirs.iter().map(|w| C64::from_polar((2.0 * PI).powf(-0.5), m as f64 * w[1].atan2(w[0]))).collect();
                out.push((m.unsigned_abs() as usize, m, v));
            }
        }
        3 => {
            let leg: Vec<Vec<Vec<f64>>> = (0..=l).map(|m| dirs.iter().map(|w| normalized_legendre(l, m, w[2].clamp(-1.0, 1.0))).collect()).collect();
            for deg in 0..=l {
                for m in -(deg as i64)..=(deg as i64) {
                    let ma = m.unsigned_abs() as usize;
                    let v = dirs
                        .iter()
                        .zip(&leg[ma])
                        .map(|(w, lz)| C64::from_polar(lz[deg - ma] / (2.0 * PI).sqrt(), m as f64 * w[1].atan2(w[0])))
                        .collect();
                    out.push((deg, m, v));
                }
            }
        }
        _ => return Err(SrlError::UnsupportedDimension(dim)),
    }
    Ok(out)
}

/// Harmonics of degree <= l sampled on the grid; orthonormal for the grid's weights.
pub fn harmonic_basis(grid: &Arc<SphereGrid>, l: usize) -> Result<Vec<SphereFunction>> {
    if l > grid.max_degree() {
        return Err(SrlError::ResolutionTooSmall(grid.max_degree(), l));
    }
    Ok(harmonics_at(grid.dim, l, &grid.nodes)?
        .into_iter()
        .map(|(_, _, values)| SphereFunction { grid: grid.clone(), values })
        .collect())
}

/// Associated Legendre functions of order m, degrees m..=l, orthonormal on [-1, 1].
fn normalized_legendre(l: usize, m: usize, z: f64) -> Vec<f64> {
    let s = (1.0 - z * z).max(0.0).sqrt();
    let mut pmm = 0.5f64.sqrt();
    for k in 1..=m {
        pmm *= ((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    let mut out = vec![pmm];
    if l > m {
        out.push((2.0 * m as f64 + 3.0).sqrt() * z * pmm);
    }
    for deg in m + 2..=l {
        let (d, mf) = (deg as f64, m as f64);
        let a = ((4.0 * d * d - 1.0) / (d * d - mf * mf)).sqrt();
        let b = (((d - 1.0) * (d - 1.0) - mf * mf) / (4.0 * (d - 1.0) * (d - 1.0) - 1.0)).sqrt();
        let k = out.len();
        out.push(a * (z * out[k - 1] - b * out[k - 2]));
    }
    out
}

/// Sum_j w_j conj(f_j) g_j.
pub fn inner_product(f: &SphereFunction, g: &SphereFunction) -> Result<C64> {
    if !f.same_grid(g) {
        return Err(SrlError::GridMismatch);
    }
    let w = &f.grid.weights;
    let re: Vec<f64> = (0..w.len()).map(|j| w[j] * (f.values[j].conj() * g.values[j]).re).collect();
    let im: Vec<f64> = (0..w.len()).map(|j| w[j] * (f.values[j].conj() * g.values[j]).im).collect();
    Ok(C64::new(pairwise_sum(&re), pairwise_sum(&im)))
}

// ---------------------------------------------------------------- space

pub const NODES_PER_PANEL: usize = 8;

#[derive(Clone, Debug)]
pub struct SpaceGrid {
    pub dim: usize,
    pub r_max: f64,
    pub panel_len: f64,
    pub radial: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angular: Arc<SphereGrid>,
    pub tail_exponent: f64,
}

pub fn make_space_grid(n: usize, r_max: f64, radial_nodes: usize, angular_resolution: usize, tail_exponent: f64) -> Result<SpaceGrid> {
    if !(r_max > 0.0) {
        return Err(SrlError::Domain("R_max must be positive".into()));
    }
    if !(tail_exponent > 0.0) {
        return Err(SrlError::Domain("tail exponent must be positive".into()));
    }
    let angular = make_sphere_grid(n, angular_resolution)?;
    let q = Exponent::stein_tomas(n).value();
    if q * tail_exponent <= n as f64 {
        return Err(SrlError::DivergentTail(q * tail_exponent, n));
    }
    let panels = radial_nodes.div_ceil(NODES_PER_PANEL).max(1);
    let (radial, radial_weights) = composite_gl(&uniform_edges(0.0, r_max, panels), NODES_PER_PANEL);
    Ok(SpaceGrid { dim: n, r_max, panel_len: r_max / panels as f64, radial, radial_weights, angular, tail_exponent })
}

impl SpaceGrid {
    pub fn num_points(&self) -> usize {
        self.radial.len() * self.angular.len()
    }

    /// Point index = k * n_angular + a.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let na = self.angular.len();
        let (k, a) = (idx / na, idx % na);
        let r = self.radial[k];
        let w = self.angular.nodes[a];
        [r * w[0], r * w[1], r * w[2]]
    }

    pub fn weight(&self, idx: usize) -> f64 {
        let na = self.angular.len();
        let (k, a) = (idx / na, idx % na);
        self.radial_weights[k] * self.radial[k].powi(self.dim as i32 - 1) * self.angular.weights[a]
    }

    /// Integral of a function given at every point, without tail.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let v: Vec<f64> = values.iter().enumerate().map(|(i, x)| x * self.weight(i)).collect();
        pairwise_sum(&v)
    }

    /// Integral over R^N of a function whose angular integrals on the radial nodes are `shell`,
    /// plus the power-law tail for |u|^q with decay |u| ~ r^{-tail_exponent}.
    /// Returns (value, tail).
    pub fn integrate_shells(&self, shell: &[f64], q: f64) -> (f64, f64) {
        let n = self.dim as i32;
        let body: Vec<f64> = (0..self.radial.len())
            .map(|k| self.radial_weights[k] * self.radial[k].powi(n - 1) * shell[k])
            .collect();
        let body = pairwise_sum(&body);
        let tail = self.tail_estimate(shell, q);
        (body + tail, tail)
    }

    /// Fit r^{q tau} E(r) = sum_k r^{-k} (A_k + sum_j (b_jk cos 2jr + c_jk sin 2jr)), k < 3,
    /// over the outer window and integrate the fitted model times r^{N-1-q tau} from R_max on.
    pub fn tail_estimate(&self, shell: &[f64], q: f64) -> f64 {
        const HARMONICS: usize = 4;
        const ORDERS: usize = 3;
        let p = q * self.tail_exponent;
        let n = self.dim as f64;
        let window = (0.3 * self.r_max).max(2.0 * PI).min(self.r_max);
        let lo = self.r_max - window;
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        let mut ws = Vec::new();
        for (k, &r) in self.radial.iter().enumerate() {
            if r < lo {
                continue;
            }
            let mut row = Vec::with_capacity(ORDERS * (2 * HARMONICS + 1));
            for o in 0..ORDERS {
                let s = r.powi(-(o as i32));
                row.push(s);
                for j in 1..=HARMONICS {
                    let a = 2.0 * j as f64 * r;
                    row.push(s * a.cos());
                    row.push(s * a.sin());
                }
            }
            rows.push(row);
            ys.push(r.powf(p) * shell[k]);
            ws.push(self.radial_weights[k]);
        }
        let r = self.r_max;
        if rows.len() < ORDERS * (2 * HARMONICS + 1) + 10 {
            let wsum: f64 = ws.iter().sum();
            let amp = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
            return amp.max(0.0) * r.powf(n - p) / (p - n);
        }
        let c = least_squares(&rows, &ys, &ws);
        let mut tail = 0.0;
        for o in 0..ORDERS {
            let m = p - n + 1.0 + o as f64;
            let base = o * (2 * HARMONICS + 1);
            tail += c[base] * r.powf(1.0 - m) / (m - 1.0);
            for j in 1..=HARMONICS {
                let z = oscillatory_tail(2.0 * j as f64, m, r);
                tail += c[base + 2 * j - 1] * z.re + c[base + 2 * j] * z.im;
            }
        }
        tail.max(0.0)
    }
}

/// int_R^inf e^{i w r} r^{-m} dr by its asymptotic series (w R large).
fn oscillatory_tail(w: f64, m: f64, r: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..30 {
        let next = term * ((m + k as f64) / (-i * w * r));
        if next.norm() > term.norm() {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-17 {
            break;
        }
    }
    -C64::from_polar(1.0, w * r) / (i * w) * r.powf(-m) * sum
}

// ---------------------------------------------------------------- profiles

/// Uniform lattice spacing * (offsets + k), k in [0, shape) per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub spacing: f64,
    pub offsets: Vec<i64>,
    pub shape: Vec<usize>,
}

impl Lattice {
    /// Symmetric box with points -half..=half on every axis.
    pub fn centered(d: usize, spacing: f64, half: usize) -> Self {
        Lattice { spacing, offsets: vec![-(half as i64); d], shape: vec![2 * half + 1; d] }
    }
    pub fn dim(&self) -> usize {
        self.shape.len()
    }
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn axis(&self, a: usize) -> Vec<f64> {
        (0..self.shape[a]).map(|k| self.spacing * (self.offsets[a] + k as i64) as f64).collect()
    }
    /// Dual-lattice frequencies 2 pi m / (n h), m = -floor(n/2) .. ceil(n/2) - 1.
    pub fn dual_axis(&self, a: usize) -> Vec<f64> {
        let n = self.shape[a] as i64;
        let dxi = 2.0 * PI / (n as f64 * self.spacing);
        (0..n).map(|m| (m - n / 2) as f64 * dxi).collect()
    }
    pub fn dual_spacing(&self, a: usize) -> f64 {
        2.0 * PI / (self.shape[a] as f64 * self.spacing)
    }
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut r = idx;
        for a in (0..self.dim()).rev() {
            let k = r % self.shape[a];
            r /= self.shape[a];
            out[a] = self.spacing * (self.offsets[a] + k as i64) as f64;
        }
        out
    }
}

/// Spectrum on the dual lattice of a profile lattice.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub lattice: Lattice,
    pub freqs: Vec<Vec<f64>>,
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn freq(&self, idx: usize) -> Vec<f64> {
        let d = self.lattice.dim();
        let mut out = vec![0.0; d];
        let mut r = idx;
        for a in (0..d).rev() {
            let n = self.lattice.shape[a];
            out[a] = self.freqs[a][r % n];
            r /= n;
        }
        out
    }

    pub fn cell(&self) -> f64 {
        (0..self.lattice.dim()).map(|a| self.lattice.dual_spacing(a)).product()
    }

    /// Exact inverse of `ProfileFunction::dft`.
    pub fn inverse(&self) -> ProfileFunction {
        let mats: Vec<(Vec<C64>, usize)> = (0..self.lattice.dim())
            .map(|a| {
                let xs = self.lattice.axis(a);
                let c = self.lattice.dual_spacing(a) / (2.0 * PI).sqrt();
                let mut m = Vec::with_capacity(xs.len() * xs.len());
                for &x in &xs {
                    for &xi in &self.freqs[a] {
                        m.push(C64::from_polar(c, xi * x));
                    }
                }
                (m, xs.len())
            })
            .collect();
        let (values, _) = crate::numerics::apply_separable(&self.values, &self.lattice.shape, &mats);
        ProfileFunction { lattice: self.lattice.clone(), values }
    }
}

#[derive(Clone, Debug)]
pub struct ProfileFunction {
    pub lattice: Lattice,
    pub values: Vec<C64>,
}

impl ProfileFunction {
    pub fn new(lattice: Lattice, values: Vec<C64>) -> Result<Self> {
        if lattice.is_empty() || values.len() != lattice.len() {
            return Err(SrlError::GridMismatch);
        }
        if !(lattice.spacing > 0.0) {
            return Err(SrlError::Domain("spacing must be positive".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SrlError::Domain("non-finite profile value".into()));
        }
        Ok(ProfileFunction { lattice, values })
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..lattice.len()).map(|i| f(&lattice.point(i))).collect();
        ProfileFunction { lattice, values }
    }

    /// e^{-|x|^2/2}.
    pub fn gaussian(d: usize, spacing: f64, half: usize) -> Self {
        Self::from_fn(Lattice::centered(d, spacing, half), |x| C64::new((-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0))
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn zeros_like(&self) -> Self {
        ProfileFunction { lattice: self.lattice.clone(), values: vec![C64::new(0.0, 0.0); self.values.len()] }
    }

    pub fn norm(&self) -> f64 {
        let h = self.lattice.spacing.powi(self.dim() as i32);
        let v: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        (h * pairwise_sum(&v)).sqrt()
    }

    pub fn scaled(&self, c: C64) -> Self {
        ProfileFunction { lattice: self.lattice.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn conj(&self) -> Self {
        ProfileFunction { lattice: self.lattice.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// lambda^{d/2} psi(lambda x), exact on the lattice (spacing divided by lambda).
    pub fn dilated(&self, lambda: f64) -> Self {
        let mut lattice = self.lattice.clone();
        lattice.spacing /= lambda;
        let c = lambda.powf(0.5 * self.dim() as f64);
        ProfileFunction { lattice, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Discrete Fourier transform onto the dual lattice, (2 pi)^{-d/2} h^d sum psi_k e^{-i xi x_k}.
    pub fn dft(&self) -> Spectrum {
        let d = self.dim();
        let freqs: Vec<Vec<f64>> = (0..d).map(|a| self.lattice.dual_axis(a)).collect();
        let mats: Vec<(Vec<C64>, usize)> = (0..d)
            .map(|a| {
                let xs = self.lattice.axis(a);
                let c = self.lattice.spacing / (2.0 * PI).sqrt();
                let mut m = Vec::with_capacity(xs.len() * xs.len());
                for &xi in &freqs[a] {
                    for &x in &xs {
                        m.push(C64::from_polar(c, -xi * x));
                    }
                }
                (m, xs.len())
            })
            .collect();
        let (values, _) = crate::numerics::apply_separable(&self.values, &self.lattice.shape, &mats);
        Spectrum { lattice: self.lattice.clone(), freqs, values }
    }

    /// Fourier transform of the band-limited interpolant: the lattice Riemann sum inside the
    /// Nyquist box |xi_a| < pi/h, zero outside.
    pub fn fourier_at(&self, xi: &[f64]) -> C64 {
        let d = self.dim();
        let nyq = PI / self.lattice.spacing;
        if xi.iter().any(|t| t.abs() >= nyq) {
            return C64::new(0.0, 0.0);
        }
        let c = self.lattice.spacing / (2.0 * PI).sqrt();
        let vecs: Vec<Vec<C64>> = (0..d)
            .map(|a| self.lattice.axis(a).iter().map(|&x| C64::from_polar(c, -xi[a] * x)).collect())
            .collect();
        contract(&self.values, &self.lattice.shape, &vecs)
    }

    /// Whittaker-Shannon interpolation at an off-lattice point.
    pub fn eval_at(&self, x: &[f64]) -> C64 {
        let d = self.dim();
        let h = self.lattice.spacing;
        let vecs: Vec<Vec<C64>> = (0..d)
            .map(|a| {
                (0..self.lattice.shape[a])
                    .map(|k| {
                        let u = PI * (x[a] / h - (self.lattice.offsets[a] + k as i64) as f64);
                        C64::new(if u.abs() < 1e-12 { 1.0 } else { u.sin() / u }, 0.0)
                    })
                    .collect()
            })
            .collect();
        contract(&self.values, &self.lattice.shape, &vecs)
    }

    /// Smallest radius R such that |psi| <= tol * max|psi| outside the ball of radius R.
    pub fn effective_radius(&self, tol: f64) -> f64 {
        let mx = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut r: f64 = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > tol * mx {
                let p = self.lattice.point(i);
                r = r.max(p.iter().map(|t| t * t).sum::<f64>().sqrt());
            }
        }
        r + self.lattice.spacing
    }
}

/// Full contraction of a row-major tensor with one vector per axis.
pub fn contract(values: &[C64], shape: &[usize], vecs: &[Vec<C64>]) -> C64 {
    let d = shape.len();
    let mut cur: Vec<C64> = values.to_vec();
    for a in (0..d).rev() {
        let n = shape[a];
        let outer = cur.len() / n;
        let v = &vecs[a];
        let mut next = Vec::with_capacity(outer);
        for o in 0..outer {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += cur[o * n + k] * v[k];
            }
            next.push(s);
        }
        cur = next;
    }
    cur[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_weights() {
        let g = make_sphere_grid(2, 64).unwrap();
        assert!((g.area() - 2.0 * PI).abs() < 1e-12);
        let g = make_sphere_grid(3, 32).unwrap();
        assert!((g.area() - 4.0 * PI).abs() < 1e-12);
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(p, w)| w * p[2] * p[2]).sum();
        assert!((s - 4.0 * PI / 3.0).abs() < 1e-10);
        assert!(make_sphere_grid(4, 32).is_err());
        assert!(make_sphere_grid(3, 4).is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(Exponent::stein_tomas(2), Exponent { num: 6, den: 1 });
        assert_eq!(Exponent::stein_tomas(3), Exponent { num: 4, den: 1 });
        assert_eq!(Exponent::strichartz(3), Exponent { num: 10, den: 3 });
    }

    #[test]
    fn dft_roundtrip() {
        let p = ProfileFunction::from_fn(Lattice { spacing: 0.3, offsets: vec![-5, -3], shape: vec![11, 8] }, |x| C64::new(x[0], x[1] * x[1]));
        let back = p.dft().inverse();
        for (a, b) in p.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn space_grid_gaussian() {
        let s = make_space_grid(3, 60.0, 600, 32, 1.0).unwrap();
        let v: Vec<f64> = (0..s.num_points()).map(|i| {
            let p = s.point(i);
            (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).exp()
        }).collect();
        assert!((s.integrate(&v) - PI.powf(1.5)).abs() < 1e-8);
        assert!(make_space_grid(2, 80.0, 800, 128, 0.5).is_ok());
        assert!(make_space_grid(2, 80.0, 800, 128, 0.3).is_err());
    }
}
