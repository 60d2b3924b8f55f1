//! The extension operator f -> f-check, its adjoint, and the Stein-Tomas quotient.

use crate::error::{Result, SrlError};
use crate::geometry::{abs_pow, Exponent, SpaceGrid, SphereFunction, SphereGrid, NODES_PER_PANEL};
use crate::numerics::{pairwise_sum, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub quotient: f64,
    pub numerator: f64,
    pub l2_norm: f64,
    pub tail_fraction: f64,
    pub trusted: bool,
}

pub fn prefactor(n: usize) -> f64 {
    (2.0 * PI).powf(-0.5 * n as f64)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn pad(x: &[f64]) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[..x.len()].copy_from_slice(x);
    p
}

/// f-check(x) = (2 pi)^{-N/2} sum_j w_j e^{i x . omega_j} f_j.
pub fn extend(f: &SphereFunction, x: &[f64]) -> C64 {
    let g = &f.grid;
    let p = pad(x);
    let terms: Vec<C64> = (0..g.len())
        .map(|j| f.values[j] * C64::from_polar(g.weights[j], dot(&p, &g.nodes[j])))
        .collect();
    crate::numerics::pairwise_sum_c(&terms) * prefactor(g.dim)
}

pub fn extend_many(f: &SphereFunction, points: &[[f64; 3]]) -> Vec<C64> {
    points.par_iter().map(|x| extend(f, x)).collect()
}

/// Phase tables for one ray of the space grid: e^{i c_k p_j} and e^{i H p_j}.
struct RayTables {
    inner: Vec<Vec<C64>>,
    step: Vec<C64>,
    p: Vec<f64>,
}

fn ray_tables(space: &SpaceGrid, grid: &SphereGrid, dir: &[f64; 3]) -> RayTables {
    let p: Vec<f64> = grid.nodes.iter().map(|w| dot(dir, w)).collect();
    let inner = (0..NODES_PER_PANEL)
        .map(|k| {
            let c = space.radial[k];
            p.iter().map(|&pj| C64::from_polar(1.0, c * pj)).collect()
        })
        .collect();
    let step = p.iter().map(|&pj| C64::from_polar(1.0, space.panel_len * pj)).collect();
    RayTables { inner, step, p }
}

fn panels(space: &SpaceGrid) -> usize {
    space.radial.len() / NODES_PER_PANEL
}

/// f-check on every point of the space grid, index k * n_angular + a.
pub fn extend_on_space(f: &SphereFunction, space: &SpaceGrid) -> Vec<C64> {
    let grid = &f.grid;
    let na = space.angular.len();
    let nr = space.radial.len();
    let g: Vec<C64> = f.values.iter().zip(&grid.weights).map(|(v, w)| v * *w).collect();
    let c = prefactor(grid.dim);
    let per_ray: Vec<Vec<C64>> = (0..na)
        .into_par_iter()
        .map(|a| {
            let t = ray_tables(space, grid, &space.angular.nodes[a]);
            let mut out = vec![C64::new(0.0, 0.0); nr];
            let mut base: Vec<C64> = vec![C64::new(1.0, 0.0); g.len()];
            let mut h = vec![C64::new(0.0, 0.0); g.len()];
            for m in 0..panels(space) {
                if m % 16 == 0 {
                    let s = m as f64 * space.panel_len;
                    for (b, pj) in base.iter_mut().zip(&t.p) {
                        *b = C64::from_polar(1.0, s * pj);
                    }
                }
                for j in 0..g.len() {
                    h[j] = g[j] * base[j];
                }
                for k in 0..NODES_PER_PANEL {
                    let v = &t.inner[k];
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..g.len() {
                        s += h[j] * v[j];
                    }
                    out[m * NODES_PER_PANEL + k] = s * c;
                }
                for (b, u) in base.iter_mut().zip(&t.step) {
                    *b *= u;
                }
            }
            out
        })
        .collect();
    let mut vals = vec![C64::new(0.0, 0.0); nr * na];
    for (a, ray) in per_ray.iter().enumerate() {
        for k in 0..nr {
            vals[k * na + a] = ray[k];
        }
    }
    vals
}

/// E* F (omega_j) = (2 pi)^{-N/2} sum_x W_x e^{-i x . omega_j} F(x) over the truncated grid.
pub fn adjoint_on_space(field: &[C64], space: &SpaceGrid, grid: &Arc<SphereGrid>) -> SphereFunction {
    let na = space.angular.len();
    let c = prefactor(grid.dim);
    let per_ray: Vec<Vec<C64>> = (0..na)
        .into_par_iter()
        .map(|a| {
            let t = ray_tables(space, grid, &space.angular.nodes[a]);
            let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
            let mut base: Vec<C64> = vec![C64::new(1.0, 0.0); grid.len()];
            let mut h = vec![C64::new(0.0, 0.0); grid.len()];
            for m in 0..panels(space) {
                if m % 16 == 0 {
                    let s = m as f64 * space.panel_len;
                    for (b, pj) in base.iter_mut().zip(&t.p) {
                        *b = C64::from_polar(1.0, s * pj);
                    }
                }
                h.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                for k in 0..NODES_PER_PANEL {
                    let idx = m * NODES_PER_PANEL + k;
                    let wf = field[idx * na + a] * space.weight(idx * na + a);
                    let v = &t.inner[k];
                    for j in 0..grid.len() {
                        h[j] += wf * v[j].conj();
                    }
                }
                for j in 0..grid.len() {
                    acc[j] += h[j] * base[j].conj();
                }
                for (b, u) in base.iter_mut().zip(&t.step) {
                    *b *= u;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    for ray in &per_ray {
        for j in 0..grid.len() {
            values[j] += ray[j];
        }
    }
    for v in values.iter_mut() {
        *v *= c;
    }
    SphereFunction { grid: grid.clone(), values }
}

/// Angular integrals of |u|^q on every radial node.
pub fn shells(field: &[C64], space: &SpaceGrid, q: f64) -> Vec<f64> {
    let na = space.angular.len();
    (0..space.radial.len())
        .map(|k| {
            let v: Vec<f64> = (0..na).map(|a| space.angular.weights[a] * abs_pow(field[k * na + a], q)).collect();
            pairwise_sum(&v)
        })
        .collect()
}

/// (integral of |f-check|^q over R^N including the tail model, tail fraction).
pub fn lq_norm_q(f: &SphereFunction, space: &SpaceGrid, q: f64) -> Result<(f64, f64)> {
    if f.grid.dim != space.dim {
        return Err(SrlError::GridMismatch);
    }
    if q * space.tail_exponent <= space.dim as f64 {
        return Err(SrlError::DivergentTail(q * space.tail_exponent, space.dim));
    }
    let field = extend_on_space(f, space);
    Ok(energy_of_field(&field, space, q))
}

pub fn energy_of_field(field: &[C64], space: &SpaceGrid, q: f64) -> (f64, f64) {
    let (value, tail) = space.integrate_shells(&shells(field, space, q), q);
    (value, if value > 0.0 { tail / value } else { 0.0 })
}

pub fn stein_tomas_quotient(f: &SphereFunction, space: &SpaceGrid) -> Result<QuotientReport> {
    let l2 = f.norm();
    if l2 == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    let q = Exponent::stein_tomas(f.grid.dim).value();
    let (num, tail) = lq_norm_q(f, space, q)?;
    Ok(QuotientReport { quotient: num / l2.powf(q), numerator: num, l2_norm: l2, tail_fraction: tail, trusted: tail < 0.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_space_grid, make_sphere_grid};

    #[test]
    fn constant_extension_closed_form() {
        let g = make_sphere_grid(3, 32).unwrap();
        let f = SphereFunction::constant(&g, 1.0);
        let v = extend(&f, &[0.0, 0.0, 0.0]);
        assert!((v.re - 4.0 * PI * (2.0 * PI).powf(-1.5)).abs() < 1e-12);
        assert!(extend(&f, &[0.0, PI, 0.0]).norm() < 1e-12);
    }

    #[test]
    fn panel_trick_matches_direct() {
        let g = make_sphere_grid(3, 12).unwrap();
        let f = SphereFunction::from_fn(&g, |w| C64::new(w[0] + 0.3, w[2] * w[1]));
        let s = make_space_grid(3, 20.0, 160, 8, 1.0).unwrap();
        let field = extend_on_space(&f, &s);
        for idx in [0, 17, 555, s.num_points() - 1] {
            let d = extend(&f, &s.point(idx));
            assert!((d - field[idx]).norm() < 1e-10);
        }
    }
}
