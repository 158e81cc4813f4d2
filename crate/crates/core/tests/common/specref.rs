//! Independent references for the special functions: power series,
//! periodic trapezoid sums and Laplace-type integrals.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::{c, integrate_panels, log_grid, uniform};

pub const EULER: f64 = 0.577_215_664_901_532_9;
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / f64::from(k)).sum()
}

pub fn j_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    (0..60u32)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * h.powi((2 * k + n) as i32) / (factorial(k) * factorial(k + n))
        })
        .sum()
}

pub fn y_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let head: f64 = (0..n)
        .map(|k| factorial(n - k - 1) / factorial(k) * h.powi(2 * k as i32 - n as i32))
        .sum();
    let tail: f64 = (0..60u32)
        .map(|k| {
            let psi = (harmonic(k) - EULER) + (harmonic(n + k) - EULER);
            psi * (-h * h).powi(k as i32) * h.powi(n as i32) / (factorial(k) * factorial(n + k))
        })
        .sum();
    -head / PI + 2.0 / PI * h.ln() * j_series(n, x) - tail / PI
}

/// Periodic trapezoid rule for the Bessel integral, exponentially accurate.
pub fn j_trapezoid(n: u32, x: f64) -> f64 {
    let m = 2 * x.ceil() as usize + 64;
    (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            (f64::from(n) * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / m as f64
}

/// Hankel function from its Laplace-type integral with `u = s^2`.
pub fn hankel_integral(n: u32, x: f64) -> Complex64 {
    let nu = f64::from(n);
    let gamma = if n == 0 { PI.sqrt() } else { 0.75 * PI.sqrt() };
    let integral = integrate_panels(
        |s| {
            let s2 = s * s;
            c(1.0, s2 / (2.0 * x)).powf(nu - 0.5) * ((-s2).exp() * s.powi(2 * n as i32))
        },
        &uniform(0.0, 8.0, 400),
    );
    let phase = Complex64::from_polar(1.0, x - nu * FRAC_PI_2 - FRAC_PI_4);
    phase * (2.0 / (PI * x)).sqrt() / gamma * 2.0 * integral
}

/// `e^x K_n(x)` from the cosh integral.
pub fn k_scaled(n: u32, x: f64) -> f64 {
    let top = (1.0 + 80.0 / x).acosh();
    integrate_panels(
        |t| c((-x * (t.cosh() - 1.0)).exp() * (f64::from(n) * t).cosh(), 0.0),
        &uniform(0.0, top, 600),
    )
    .re
}

/// `E1(ix) = -Ci(x) + i si(x)` from `e^{-ix} int_0^inf e^{-s} / (s + ix) ds`.
pub fn e1_imaginary(x: f64) -> Complex64 {
    let mut edges = vec![0.0];
    let mut e = x.min(1.0) * 1e-3;
    while e < 60.0 {
        edges.push(e);
        e *= 1.5;
    }
    edges.push(60.0);
    let integral = integrate_panels(|s| c((-s).exp(), 0.0) / c(s, x), &edges);
    Complex64::from_polar(1.0, -x) * integral
}

pub fn rel(a: f64, b: f64, envelope: f64) -> f64 {
    (a - b).abs() / b.abs().max(envelope)
}

pub fn envelope(x: f64) -> f64 {
    if x >= 0.5 {
        (2.0 / (PI * x)).sqrt()
    } else {
        0.0
    }
}

pub fn grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 50)
}
