//! Shared helpers for the integration tests. Nothing here calls into the
//! crate's own numerics, so results can serve as independent references.
#![allow(dead_code)]

pub mod specref;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite 20-point Gauss-Legendre over the given panel edges.
pub fn integrate_panels<F: FnMut(f64) -> Complex64>(mut f: F, edges: &[f64]) -> Complex64 {
    let (x, w) = gauss_legendre(20);
    let mut sum = Complex64::new(0.0, 0.0);
    for e in edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for k in 0..x.len() {
            sum += f(c + h * x[k]) * (w[k] * h);
        }
    }
    sum
}

/// `n` equal panels over `[a, b]`.
pub fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Textbook retarded dipole coupling, outgoing-wave convention.
pub fn textbook_dipole(p: f64, r: [f64; 3], eps: f64) -> [[Complex64; 3]; 3] {
    let rr = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let x = p * rr;
    let pre = Complex64::from_polar(1.0, x) / (4.0 * std::f64::consts::PI * eps * rr.powi(3));
    let mut out = [[c(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d = if i == j { 1.0 } else { 0.0 };
            let nn = r[i] * r[j] / (rr * rr);
            out[i][j] = pre * ((d - 3.0 * nn) * c(1.0, -x) - (d - nn) * x * x);
        }
    }
    out
}

pub fn max_abs(t: &[[Complex64; 3]; 3]) -> f64 {
    t.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn tensor_rel_diff(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> f64 {
    let scale = max_abs(a).max(max_abs(b));
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst / scale
}

/// Least-squares slope of `-ln|y|` against `ln x`.
pub fn loglog_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    -sxy / sxx
}
