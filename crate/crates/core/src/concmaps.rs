//! Concentration maps between profile pairs and sphere functions, and the rescaled
//! extension operators T_delta.

use crate::error::{Result, SrlError};
use crate::extension::extend;
use crate::geometry::{Lattice, ProfileFunction, SphereFunction, SphereGrid, Spectrum};
use crate::numerics::{gauss_legendre_on, pairwise_sum, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// (zeta_1(k), zeta_2(k)) = (1/sqrt(1+k^2), 2(1 - 1/sqrt(1+k^2))/k^2).
pub fn zeta(k: f64) -> Result<(f64, f64)> {
    if k < 0.0 || k.is_nan() {
        return Err(SrlError::Domain(format!("zeta needs k >= 0, got {k}")));
    }
    Ok(zeta_unchecked(k))
}

fn zeta_unchecked(k: f64) -> (f64, f64) {
    let s = (1.0 + k * k).sqrt();
    // 1 - 1/s = k^2 / (s (s + 1)) without cancellation
    (1.0 / s, 2.0 / (s * (s + 1.0)))
}

#[derive(Clone, Debug)]
pub struct ConcentrationFrame {
    pub n: usize,
    pub r: [[f64; 3]; 3],
    pub delta: f64,
    pub a: [f64; 3],
}

impl ConcentrationFrame {
    pub fn new(n: usize, r: [[f64; 3]; 3], delta: f64, a: [f64; 3]) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(SrlError::UnsupportedDimension(n));
        }
        if !(delta > 0.0) {
            return Err(SrlError::Domain("delta must be positive".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| r[k][i] * r[k][j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                if (s - e).abs() > 1e-12 {
                    return Err(SrlError::Domain("R is not orthogonal".into()));
                }
            }
        }
        Ok(ConcentrationFrame { n, r, delta, a })
    }

    pub fn identity(n: usize, delta: f64) -> Result<Self> {
        Self::new(n, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], delta, [0.0; 3])
    }

    pub fn with_rotation(mut self, r: [[f64; 3]; 3]) -> Result<Self> {
        self = Self::new(self.n, r, self.delta, self.a)?;
        Ok(self)
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut o = [0.0; 3];
        for i in 0..self.n {
            for k in 0..self.n {
                o[i] += self.r[i][k] * v[k];
            }
        }
        o
    }

    pub fn apply_inverse(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut o = [0.0; 3];
        for i in 0..self.n {
            for k in 0..self.n {
                o[i] += self.r[k][i] * v[k];
            }
        }
        o
    }
}

/// Haar-random rotation in dimension n (Gram-Schmidt on a Gaussian matrix, det +1).
pub fn random_rotation(n: usize, seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<[f64; 3]> = Vec::new();
    while cols.len() < n {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(n) {
            *x = rng.sample(StandardNormal);
        }
        for c in &cols {
            let p: f64 = (0..n).map(|i| v[i] * c[i]).sum();
            for i in 0..n {
                v[i] -= p * c[i];
            }
        }
        let nv = (0..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if nv > 1e-8 {
            cols.push(v.map(|x| x / nv));
        }
    }
    let mut r = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            r[i][j] = cols[j][i];
        }
    }
    let det = if n == 2 {
        r[0][0] * r[1][1] - r[0][1] * r[1][0]
    } else {
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    };
    if det < 0.0 {
        for row in r.iter_mut().take(n) {
            row[0] = -row[0];
        }
    }
    r
}

/// B_{R,delta}(phi+, phi-) for profiles given as closures on R^{N-1}, then modulated by e^{i a.omega}.
pub fn b_map_fn(
    phi_plus: &(dyn Fn(&[f64]) -> C64 + Sync),
    phi_minus: &(dyn Fn(&[f64]) -> C64 + Sync),
    frame: &ConcentrationFrame,
    grid: &Arc<SphereGrid>,
) -> Result<SphereFunction> {
    let n = frame.n;
    if grid.dim != n {
        return Err(SrlError::GridMismatch);
    }
    let d = n - 1;
    let delta = frame.delta;
    let scale = delta.powf(-0.5 * d as f64);
    let values: Vec<Result<C64>> = grid
        .nodes
        .par_iter()
        .map(|w| {
            let v = frame.apply_inverse(w);
            let wn = v[n - 1];
            if wn.abs() < 1e-14 {
                return Err(SrlError::Domain("grid node on the equator of the frame".into()));
            }
            let xi: Vec<f64> = (0..d).map(|i| v[i] / wn.abs()).collect();
            let x2: f64 = xi.iter().map(|t| t * t).sum();
            let arg: Vec<f64> = xi.iter().map(|t| t / delta).collect();
            let phi = if wn > 0.0 { phi_plus(&arg) } else { phi_minus(&arg) };
            let ph: f64 = (0..n).map(|i| frame.a[i] * w[i]).sum();
            Ok(phi * (1.0 + x2).powf(0.25 * n as f64) * scale * C64::from_polar(1.0, ph))
        })
        .collect();
    let values: Result<Vec<C64>> = values.into_iter().collect();
    SphereFunction::new(grid.clone(), values?)
}

/// B_{R,delta}(phi+, phi-) with off-lattice values from band-limited interpolation.
pub fn b_map(phi_plus: &ProfileFunction, phi_minus: &ProfileFunction, frame: &ConcentrationFrame, grid: &Arc<SphereGrid>) -> Result<SphereFunction> {
    let d = frame.n - 1;
    if phi_plus.dim() != d || phi_minus.dim() != d {
        return Err(SrlError::GridMismatch);
    }
    let zero_m = phi_minus.values.iter().all(|v| v.norm() == 0.0);
    let zero_p = phi_plus.values.iter().all(|v| v.norm() == 0.0);
    b_map_fn(
        &|x| if zero_p { C64::new(0.0, 0.0) } else { phi_plus.eval_at(x) },
        &|x| if zero_m { C64::new(0.0, 0.0) } else { phi_minus.eval_at(x) },
        frame,
        grid,
    )
}

/// Inverse change of variables, resampled on `lattice` by interpolation on the sphere grid.
pub fn b_inverse(f: &SphereFunction, frame: &ConcentrationFrame, lattice: &Lattice) -> Result<(ProfileFunction, ProfileFunction)> {
    let n = frame.n;
    if f.grid.dim != n || lattice.dim() != n - 1 {
        return Err(SrlError::GridMismatch);
    }
    let delta = frame.delta;
    let d = n - 1;
    let scale = delta.powf(0.5 * d as f64);
    let side = |sign: f64| -> ProfileFunction {
        let values = (0..lattice.len())
            .map(|i| {
                let xi = lattice.point(i);
                let x2: f64 = xi.iter().map(|t| t * t * delta * delta).sum();
                let s = (1.0 + x2).sqrt();
                let mut v = [0.0; 3];
                for k in 0..d {
                    v[k] = delta * xi[k] / s;
                }
                v[d] = sign / s;
                let w = frame.apply(&v);
                let ph: f64 = (0..n).map(|k| frame.a[k] * w[k]).sum();
                f.grid.interpolate(&f.values, w) * C64::from_polar(scale * (1.0 + x2).powf(-0.25 * n as f64), -ph)
            })
            .collect();
        ProfileFunction { lattice: lattice.clone(), values }
    };
    Ok((side(1.0), side(-1.0)))
}

/// Precomputed T_delta psi: spectrum of psi with the zeta factors on the dual lattice.
/// The frequency integral is the Riemann sum over that lattice, so T_delta psi is periodic
/// with the box period; for delta near 1 the box has to be wide.
pub struct TDelta {
    d: usize,
    freqs: Vec<Vec<f64>>,
    coef: Vec<C64>,
    z1: Vec<f64>,
    half_z2: Vec<f64>,
}

impl TDelta {
    pub fn new(psi: &ProfileFunction, delta: f64) -> Result<Self> {
        if delta < 0.0 {
            return Err(SrlError::Domain("delta must be >= 0".into()));
        }
        let s: Spectrum = psi.dft();
        let d = psi.dim();
        let n = d + 1;
        let cell = s.cell() / (2.0 * PI).powf(0.5 * d as f64);
        let mut freqs = Vec::new();
        let mut coef = Vec::new();
        let mut z1 = Vec::new();
        let mut half_z2 = Vec::new();
        for i in 0..s.values.len() {
            if s.values[i].norm() == 0.0 {
                continue;
            }
            let xi = s.freq(i);
            let r2: f64 = xi.iter().map(|t| t * t).sum();
            let (a, b) = zeta_unchecked(delta * r2.sqrt());
            coef.push(s.values[i] * cell * (1.0 + delta * delta * r2).powf(-0.25 * n as f64));
            z1.push(a);
            half_z2.push(0.5 * b * r2);
            freqs.push(xi);
        }
        Ok(TDelta { d, freqs, coef, z1, half_z2 })
    }

    /// T_delta psi at x = (x', x_N).
    pub fn eval(&self, x: &[f64]) -> C64 {
        let d = self.d;
        let xn = x[d];
        let terms: Vec<C64> = (0..self.coef.len())
            .map(|i| {
                let xi = &self.freqs[i];
                let dot: f64 = (0..d).map(|k| xi[k] * x[k]).sum();
                self.coef[i] * C64::from_polar(1.0, dot * self.z1[i] - xn * self.half_z2[i])
            })
            .collect();
        crate::numerics::pairwise_sum_c(&terms)
    }
}

pub fn t_delta(psi: &ProfileFunction, delta: f64, x: &[f64]) -> Result<C64> {
    if x.len() != psi.dim() + 1 {
        return Err(SrlError::GridMismatch);
    }
    Ok(TDelta::new(psi, delta)?.eval(x))
}

/// Deterministic sample points in the box [-half, half]^N.
pub fn sample_points(n: usize, count: usize, half: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-half..half)).collect()).collect()
}

#[derive(Clone, Debug)]
pub struct BtConfig {
    pub sphere_resolution: usize,
    pub samples: usize,
    pub box_half: f64,
    pub seed: u64,
}

impl Default for BtConfig {
    fn default() -> Self {
        BtConfig { sphere_resolution: 96, samples: 200, box_half: 2.0, seed: 7 }
    }
}

/// Max over sample points of |delta^{-(N-1)/2} f-check(x'/delta, x_N/delta^2) - (2pi)^{-1/2}
/// (e^{i x_N/delta^2} T psi+(x) + e^{-i x_N/delta^2} T psi-(x', -x_N))| with f = B_delta(psi+^, psi-^).
pub fn bt_identity_residual(psi_plus: &ProfileFunction, psi_minus: &ProfileFunction, delta: f64) -> Result<f64> {
    bt_identity_residual_with(psi_plus, psi_minus, delta, &BtConfig::default())
}

pub fn bt_identity_residual_with(psi_plus: &ProfileFunction, psi_minus: &ProfileFunction, delta: f64, cfg: &BtConfig) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(SrlError::Domain("delta must be positive".into()));
    }
    let d = psi_plus.dim();
    let n = d + 1;
    let grid = crate::geometry::make_sphere_grid(n, cfg.sphere_resolution)?;
    let frame = ConcentrationFrame::identity(n, delta)?;
    let zero_m = psi_minus.values.iter().all(|v| v.norm() == 0.0);
    let f = b_map_fn(
        &|xi| psi_plus.fourier_at(xi),
        &|xi| if zero_m { C64::new(0.0, 0.0) } else { psi_minus.fourier_at(xi) },
        &frame,
        &grid,
    )?;
    let tp = TDelta::new(psi_plus, delta)?;
    let tm = TDelta::new(psi_minus, delta)?;
    let pts = sample_points(n, cfg.samples, cfg.box_half, cfg.seed);
    let res: Vec<f64> = pts
        .par_iter()
        .map(|x| {
            let mut y = [0.0; 3];
            for k in 0..d {
                y[k] = x[k] / delta;
            }
            y[d] = x[d] / (delta * delta);
            let lhs = extend(&f, &y[..n]) * delta.powf(-0.5 * d as f64);
            let ph = C64::from_polar(1.0, x[d] / (delta * delta));
            let mut xr = x.clone();
            xr[d] = -x[d];
            let rhs = (ph * tp.eval(x) + ph.conj() * if zero_m { C64::new(0.0, 0.0) } else { tm.eval(&xr) }) / (2.0 * PI).sqrt();
            (lhs - rhs).norm()
        })
        .collect();
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// int a(x') |T_delta (-Delta/(1-delta^2 Delta))^{1/4} psi|^2 dx / ||psi||^2, with the x_N integral
/// done exactly by Plancherel after the substitution sigma = s(|xi|).
pub fn local_smoothing_ratio(a: &(dyn Fn(f64) -> f64 + Sync), psi: &ProfileFunction, delta: f64) -> Result<f64> {
    let d = psi.dim();
    if !(1..=2).contains(&d) {
        return Err(SrlError::UnsupportedDimension(d));
    }
    let n = d + 1;
    let norm2 = psi.norm().powi(2);
    if norm2 == 0.0 {
        return Err(SrlError::ZeroNorm);
    }
    let rho_max = crate::strichartz::spectral_radius(psi, 1e-9);
    let (rho, wr) = crate::numerics::composite_gl(&crate::numerics::uniform_edges(0.0, rho_max, (rho_max / 0.5).ceil() as usize), 8);
    let dirs: Vec<Vec<f64>> = if d == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        let m = 64;
        (0..m).map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            vec![t.cos(), t.sin()]
        }).collect()
    };
    let dir_w = if d == 1 { 1.0 } else { 2.0 * PI / dirs.len() as f64 };
    // psi-hat on the polar nodes
    let hat: Vec<Vec<C64>> = rho
        .par_iter()
        .map(|&r| dirs.iter().map(|th| psi.fourier_at(&th.iter().map(|t| t * r).collect::<Vec<_>>())).collect())
        .collect();
    let z1: Vec<f64> = rho.iter().map(|&r| zeta_unchecked(delta * r).0).collect();
    let amp: Vec<f64> = rho.iter().map(|&r| (1.0 + delta * delta * r * r).powf(1.0 - 0.5 * n as f64)).collect();
    // x' quadrature: GL on [-6, 6]^d
    let (xs, wx) = gauss_legendre_on(if d == 1 { 96 } else { 48 }, -6.0, 6.0);
    let pts: Vec<(Vec<f64>, f64)> = if d == 1 {
        xs.iter().zip(&wx).map(|(x, w)| (vec![*x], *w)).collect()
    } else {
        let mut v = Vec::new();
        for (x, w) in xs.iter().zip(&wx) {
            for (y, u) in xs.iter().zip(&wx) {
                v.push((vec![*x, *y], w * u));
            }
        }
        v
    };
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|(x, w)| {
            let r2: f64 = x.iter().map(|t| t * t).sum();
            let aw = a(r2.sqrt());
            if aw == 0.0 {
                return 0.0;
            }
            let inner: Vec<f64> = (0..rho.len())
                .map(|k| {
                    let mut g = C64::new(0.0, 0.0);
                    for (j, th) in dirs.iter().enumerate() {
                        let p: f64 = th.iter().zip(x).map(|(u, v)| u * v).sum();
                        g += hat[k][j] * C64::from_polar(1.0, rho[k] * z1[k] * p);
                    }
                    g *= dir_w * rho[k].powi(d as i32 - 1);
                    wr[k] * g.norm_sqr() * amp[k]
                })
                .collect();
            w * aw * pairwise_sum(&inner)
        })
        .collect();
    Ok(pairwise_sum(&vals) * (2.0 * PI).powf(1.0 - d as f64) / norm2)
}

/// ||T_{delta_n} psi_n||_{L^2(K)} over K = [-1, 1]^N.
pub fn weak_limit_probe(psis: &[ProfileFunction], deltas: &[f64]) -> Result<Vec<f64>> {
    if psis.len() != deltas.len() {
        return Err(SrlError::Domain("sequence lengths differ".into()));
    }
    psis.iter()
        .zip(deltas)
        .map(|(psi, &delta)| {
            let t = TDelta::new(psi, delta)?;
            let n = psi.dim() + 1;
            let (x, w) = gauss_legendre_on(8, -1.0, 1.0);
            let total = 8usize.pow(n as u32);
            let v: Vec<f64> = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let mut r = idx;
                    let mut p = vec![0.0; n];
                    let mut wt = 1.0;
                    for k in 0..n {
                        p[k] = x[r % 8];
                        wt *= w[r % 8];
                        r /= 8;
                    }
                    wt * t.eval(&p).norm_sqr()
                })
                .collect();
            Ok(pairwise_sum(&v).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert_eq!(zeta(0.0).unwrap(), (1.0, 1.0));
        let (a, b) = zeta(1.0).unwrap();
        assert!((a - 0.5f64.sqrt()).abs() < 1e-15 && (b - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!(zeta(-1.0).is_err());
    }

    #[test]
    fn rotation_is_orthogonal() {
        for n in 2..=3 {
            let r = random_rotation(n, 3);
            assert!(ConcentrationFrame::new(n, r, 1.0, [0.0; 3]).is_ok());
        }
    }
}
