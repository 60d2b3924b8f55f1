//! Quadrature rules, deterministic summation, tensor transforms and a few special functions.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}

/// Composite Gauss-Legendre rule over consecutive panels with the given edges.
pub fn composite_gl(edges: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity((edges.len() - 1) * per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for p in edges.windows(2) {
        let h = 0.5 * (p[1] - p[0]);
        let c = 0.5 * (p[1] + p[0]);
        for (t, v) in x.iter().zip(&w) {
            nodes.push(c + h * t);
            weights.push(v * h);
        }
    }
    (nodes, weights)
}

/// Equal panels on [a, b].
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect()
}

/// Pairwise summation with a fixed split, so the result depends only on the input order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        return s;
    }
    let m = v.len() / 2;
    pairwise_sum(&v[..m]) + pairwise_sum(&v[m..])
}

pub fn pairwise_sum_c(v: &[C64]) -> C64 {
    if v.len() <= 32 {
        let mut s = C64::new(0.0, 0.0);
        for x in v {
            s += x;
        }
        return s;
    }
    let m = v.len() / 2;
    pairwise_sum_c(&v[..m]) + pairwise_sum_c(&v[m..])
}

/// Apply the `m x n` row-major matrix `mat` along `axis` of a row-major tensor.
pub fn apply_axis(data: &[C64], shape: &[usize], axis: usize, mat: &[C64], m: usize) -> (Vec<C64>, Vec<usize>) {
    let n = shape[axis];
    assert_eq!(mat.len(), m * n);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * m * inner];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        for i in 0..inner {
            for k in 0..n {
                col[k] = data[(o * n + k) * inner + i];
            }
            for r in 0..m {
                let row = &mat[r * n..(r + 1) * n];
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += row[k] * col[k];
                }
                out[(o * m + r) * inner + i] = s;
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = m;
    (out, new_shape)
}

/// Apply one matrix per axis (a separable linear map).
pub fn apply_separable(data: &[C64], shape: &[usize], mats: &[(Vec<C64>, usize)]) -> (Vec<C64>, Vec<usize>) {
    let mut cur = data.to_vec();
    let mut sh = shape.to_vec();
    for (axis, (mat, m)) in mats.iter().enumerate() {
        let (next, nsh) = apply_axis(&cur, &sh, axis, mat, *m);
        cur = next;
        sh = nsh;
    }
    (cur, sh)
}

/// Bessel function J0.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        let y = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= -y / (k * k);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > y {
                break;
            }
            k += 1.0;
            if k > 200.0 {
                break;
            }
        }
        sum
    } else {
        // Hankel asymptotic expansion, truncated at the smallest term.
        let mut p = 0.0;
        let mut q = 0.0;
        let mut a = 1.0;
        let mut last = f64::INFINITY;
        let z8 = 8.0 * x;
        for k in 0..60 {
            if k > 0 {
                let t = (2 * k - 1) as f64;
                a *= -(t * t) / (k as f64 * z8);
            }
            if a.abs() > last {
                break;
            }
            last = a.abs();
            match k % 4 {
                0 => p += a,
                1 => q += a,
                2 => p -= a,
                _ => q -= a,
            }
            if a.abs() < 1e-17 {
                break;
            }
        }
        let ph = x - 0.25 * PI;
        (2.0 / (PI * x)).sqrt() * (p * ph.cos() - q * ph.sin())
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Weights of the Lagrange interpolant through `nodes`, evaluated at `x`.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut out = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i] *= (x - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
    }
    out
}

/// Weighted least squares by Householder QR on the sqrt(w)-scaled rows (small systems only).
/// Columns that are numerically dependent get a zero coefficient.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64], weights: &[f64]) -> Vec<f64> {
    let m = rows.len();
    let p = rows[0].len();
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| (0..m).map(|i| weights[i].sqrt() * rows[i][j]).collect()).collect();
    let mut b: Vec<f64> = (0..m).map(|i| weights[i].sqrt() * rhs[i]).collect();
    let scale: Vec<f64> = a.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300)).collect();
    for (c, s) in a.iter_mut().zip(&scale) {
        c.iter_mut().for_each(|v| *v /= s);
    }
    let mut diag = vec![0.0; p];
    for k in 0..p.min(m) {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>();
        diag[k] = alpha;
        if vn == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let dot: f64 = col[k..].iter().zip(&v).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vn;
            col[k..].iter_mut().zip(&v).for_each(|(x, y)| *x -= f * y);
        }
        let dot: f64 = b[k..].iter().zip(&v).map(|(x, y)| x * y).sum();
        let f = 2.0 * dot / vn;
        b[k..].iter_mut().zip(&v).for_each(|(x, y)| *x -= f * y);
    }
    let mut x = vec![0.0; p];
    for k in (0..p.min(m)).rev() {
        if diag[k].abs() < 1e-12 {
            continue;
        }
        let mut s = b[k];
        for j in k + 1..p {
            s -= a[j][k] * x[j];
        }
        x[k] = s / a[k][k];
    }
    x.iter().zip(&scale).map(|(v, s)| v / s).collect()
}

/// Slope, intercept and rms residual of a weighted-free straight-line fit.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let rows: Vec<Vec<f64>> = x.iter().map(|&t| vec![1.0, t]).collect();
    let c = least_squares(&rows, y, &vec![1.0; x.len()]);
    let res = x
        .iter()
        .zip(y)
        .map(|(&t, &v)| (v - c[0] - c[1] * t).powi(2))
        .sum::<f64>()
        / x.len() as f64;
    (c[1], c[0], res.sqrt())
}

/// C-infinity ramp: 0 for x <= 0, 1 for x >= 1.
pub fn smooth_ramp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        for p in 0..20 {
            let s: f64 = x.iter().zip(&w).map(|(t, v)| v * t.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "{p} {s}");
        }
    }

    #[test]
    fn j0_matches_integral() {
        for &x in &[0.0, 0.5, 3.0, 11.9, 12.1, 17.0, 40.0, 250.0] {
            let n = 400;
            let s: f64 = (0..n).map(|k| (x * (PI * k as f64 / n as f64).sin()).cos()).sum::<f64>() / n as f64;
            assert!((bessel_j0(x) - s).abs() < 1e-10, "{x}: {} vs {s}", bessel_j0(x));
        }
    }

    #[test]
    fn pairwise_is_accurate() {
        let v: Vec<f64> = (0..10000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let s = pairwise_sum(&v);
        assert!((s - 9.787606036044382).abs() < 1e-12);
    }
}
