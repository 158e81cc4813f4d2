//! Perfect planar mirror cavity, plates at `z = 0` and `z = L`.
//!
//! Closed forms are evaluated in a canonical frame where the in-plane
//! separation points along `+x`; other in-plane directions are rotated in and
//! out about `z`.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::freespace::check_positive;
use crate::quad::{integrate, integrate_oscillatory_tail, CVec, QuadOptions};
use crate::specfun::{bessel_j012, bessel_k02, hankel1};
use crate::tensor::{self, Component, Tensor3, ZERO};
use crate::{CouplingResult, Error, Result, SumControl};

/// Smallest in-plane separation accepted, in units of `1/p`.
pub const MIN_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarGeometry {
    /// Plate separation.
    #[serde(rename = "L")]
    pub l: f64,
    pub permittivity: f64,
}

impl PlanarGeometry {
    pub fn new(l: f64, permittivity: f64) -> Result<Self> {
        check_positive("L", l)?;
        check_positive("permittivity", permittivity)?;
        Ok(PlanarGeometry { l, permittivity })
    }

    pub fn k_z(&self, n: u64) -> f64 {
        n as f64 * PI / self.l
    }
}

/// One term of a planar mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarTerm {
    pub n: u64,
    pub k_z: f64,
    pub value: Complex64,
    pub is_rd: bool,
}

/// Canonical-frame contribution of one `k_z`.
#[derive(Debug, Clone, Copy)]
struct ModeTerm {
    n: u64,
    k_z: f64,
    is_rd: bool,
    tensor: Tensor3,
}

struct Frame {
    x: f64,
    z_a: f64,
    z_d: f64,
    angle: f64,
}

fn canonical_frame(p: f64, geom: &PlanarGeometry, r_a: [f64; 3], r_d: [f64; 3]) -> Result<Frame> {
    check_positive("p", p)?;
    for (name, z) in [("z_A", r_a[2]), ("z_D", r_d[2])] {
        if !(z > 0.0 && z < geom.l) {
            return Err(Error::InvalidInput(format!("{name} = {z} must lie strictly inside (0, {})", geom.l)));
        }
    }
    let (dx, dy) = (r_a[0] - r_d[0], r_a[1] - r_d[1]);
    let x = dx.hypot(dy);
    if !(x >= MIN_SEPARATION / p) {
        return Err(Error::ZeroSeparation { separation: x, minimum: MIN_SEPARATION / p });
    }
    Ok(Frame { x, z_a: r_a[2], z_d: r_d[2], angle: dy.atan2(dx) })
}

fn check_resonance(p: f64, kappa2: f64, n: u64, tol_res: f64) -> Result<()> {
    let detuning = kappa2.abs() / (p * p);
    if kappa2 == 0.0 || detuning < tol_res {
        Err(Error::Resonant { mode: (n, 0), detuning })
    } else {
        Ok(())
    }
}

/// Closed-form contribution of mode `n` for separation `x > 0` along `+x`.
fn mode_term(p: f64, geom: &PlanarGeometry, x: f64, z_a: f64, z_d: f64, n: u64, tol_res: f64) -> Result<ModeTerm> {
    let k = geom.k_z(n);
    let kappa2 = p * p - k * k;
    let is_rd = kappa2 > 0.0;
    check_resonance(p, kappa2, n, tol_res)?;
    let (h0, h2) = if is_rd {
        let arg = x * kappa2.sqrt();
        (hankel1(0, arg)?, hankel1(2, arg)?)
    } else {
        let w = x * (-kappa2).sqrt();
        let (k0, k2) = bessel_k02(w);
        (Complex64::new(0.0, -FRAC_2_PI * k0), Complex64::new(0.0, FRAC_2_PI * k2))
    };
    let (s_a, c_a) = (k * z_a).sin_cos();
    let (s_d, c_d) = (k * z_d).sin_cos();
    let pref = Complex64::new(0.0, -1.0 / (4.0 * geom.permittivity * geom.l));
    let mut t = ZERO;
    let ss = s_a * s_d;
    t[0][0] = pref * ss * ((p * p + k * k) * h0 + kappa2 * h2);
    t[1][1] = pref * ss * ((p * p + k * k) * h0 - kappa2 * h2);
    t[2][2] = pref * 2.0 * c_a * c_d * kappa2 * h0;
    let xz = pref * x * k * kappa2 * (h0 + h2);
    t[0][2] = xz * (s_a * c_d);
    // Reciprocity: V_zx(A, D) = V_xz(D, A), which flips the sign of X.
    t[2][0] = -xz * (c_a * s_d);
    Ok(ModeTerm { n, k_z: k, is_rd, tensor: t })
}

/// Geometric estimate of the discarded tail after the last evaluated term.
fn tail_estimate(last: f64, n: u64, x: f64, l: f64) -> f64 {
    let nf = n.max(1) as f64;
    let rho = (-PI * x / l).exp() * (1.0 + 2.0 / nf).powi(2);
    if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

/// Mode sum in the canonical frame; `visit` sees every term in summation order.
fn canonical_sum(
    p: f64,
    geom: &PlanarGeometry,
    x: f64,
    z_a: f64,
    z_d: f64,
    ctrl: &SumControl,
    mut visit: impl FnMut(&ModeTerm),
) -> Result<CouplingResult> {
    ctrl.validate()?;
    let mut rd = ZERO;
    let mut nrd = ZERO;
    let mut total = ZERO;
    let mut small_run = 0;
    let mut last = 0.0;
    let mut n = 0u64;
    loop {
        if n >= ctrl.max_terms {
            let tail_bound = tail_estimate(last, n, x, geom.l);
            return Err(Error::NotConverged { terms: n, tail_bound });
        }
        let term = mode_term(p, geom, x, z_a, z_d, n, ctrl.tol_res)?;
        visit(&term);
        let part = if term.is_rd { &mut rd } else { &mut nrd };
        *part = tensor::add(part, &term.tensor);
        total = tensor::add(&total, &term.tensor);
        last = tensor::max_abs(&term.tensor);
        let scale = tensor::max_abs(&total);
        if last <= ctrl.rel_tol * scale {
            small_run += 1;
        } else {
            small_run = 0;
        }
        let q = (term.k_z * term.k_z - p * p).max(0.0).sqrt();
        n += 1;
        if !term.is_rd && q * x > ctrl.exp_cutoff && small_run >= 3 {
            let tail_bound = tail_estimate(last, n, x, geom.l);
            return Ok(CouplingResult { rd, nrd, total, terms_used: n, converged: true, tail_bound });
        }
    }
}

fn rotate_result(mut r: CouplingResult, angle: f64) -> CouplingResult {
    if angle != 0.0 {
        let rot = tensor::rotation_z(angle);
        r.rd = tensor::rotate(&rot, &r.rd);
        r.nrd = tensor::rotate(&rot, &r.nrd);
        r.total = tensor::rotate(&rot, &r.total);
    }
    r
}

/// Coupling tensor between an acceptor at `r_a` and a donor at `r_d`.
pub fn coupling_planar(
    p: f64,
    geom: &PlanarGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    ctrl: &SumControl,
) -> Result<CouplingResult> {
    let f = canonical_frame(p, geom, r_a, r_d)?;
    let r = canonical_sum(p, geom, f.x, f.z_a, f.z_d, ctrl, |_| {})?;
    Ok(rotate_result(r, f.angle))
}

/// The individual terms behind one component of [`coupling_planar`], for a
/// separation `x > 0` along `+x`. Their running sum is the component value.
pub fn planar_sum_terms(
    p: f64,
    geom: &PlanarGeometry,
    x: f64,
    z_a: f64,
    z_d: f64,
    component: Component,
    ctrl: &SumControl,
) -> Result<Vec<PlanarTerm>> {
    canonical_frame(p, geom, [x, 0.0, z_a], [0.0, 0.0, z_d])?;
    let mut terms = Vec::new();
    canonical_sum(p, geom, x, z_a, z_d, ctrl, |t| {
        terms.push(PlanarTerm { n: t.n, k_z: t.k_z, value: component.get(&t.tensor), is_rd: t.is_rd });
    })?;
    Ok(terms)
}

/// Radial `k_gamma` integrals for one `k_z` with `p -> p + i eps`:
/// `[I_xx, I_yy, I_zz, I_xz]` (see [`oracle_mode`]).
fn radial_integrals(p: Complex64, k: f64, x: f64, rel_tol: f64) -> Result<CVec<4>> {
    let kappa2 = p * p - k * k;
    let integrand = |g: f64| {
        let [j0, j1, j2] = bessel_j012(g * x);
        let inv = (kappa2 - g * g).inv();
        CVec([
            inv * g * (kappa2 * (j0 + j2) + 2.0 * k * k * j0),
            inv * g * (kappa2 * (j0 - j2) + 2.0 * k * k * j0),
            inv * kappa2 * g * j0,
            inv * kappa2 * j1,
        ])
    };
    let scale = p.norm_sqr() + k * k + 1.0 / (x * x);
    let opts = QuadOptions { rel_tol, abs_tol: 1e-3 * rel_tol * scale, max_intervals: 20_000 };
    let kappa = kappa2.sqrt();
    let mut breaks = Vec::new();
    if kappa.re > kappa.im.abs() {
        breaks.push(kappa.re);
        for w in [1.0, 10.0, 100.0, 1e3, 1e4] {
            let d = w * kappa.im.abs();
            breaks.push(kappa.re - d);
            breaks.push(kappa.re + d);
        }
    }
    let split = 2.0 * (p.norm() + k) + 8.0 * PI / x;
    let head = integrate(integrand, 0.0, split, &breaks, &opts)?;
    let tail = integrate_oscillatory_tail(integrand, split, PI / x, &opts)?;
    Ok(head.value + tail.value)
}

/// Oracle contribution of mode `n`, canonical frame.
fn oracle_mode(p: f64, eps_imag: f64, geom: &PlanarGeometry, x: f64, z_a: f64, z_d: f64, n: u64, rel_tol: f64) -> Result<Tensor3> {
    let k = geom.k_z(n);
    let [i_a, i_b, i_c, i_d] = radial_integrals(Complex64::new(p, eps_imag), k, x, rel_tol)?.0;
    let (s_a, c_a) = (k * z_a).sin_cos();
    let (s_d, c_d) = (k * z_d).sin_cos();
    let base = 1.0 / (PI * geom.permittivity * geom.l);
    let inv_x2 = 1.0 / (x * x);
    let mut t = ZERO;
    t[0][0] = 0.5 * base * s_a * s_d * (i_a - 2.0 * inv_x2);
    t[1][1] = 0.5 * base * s_a * s_d * (i_b + 2.0 * inv_x2);
    t[2][2] = base * c_a * c_d * i_c;
    t[0][2] = base * k * s_a * c_d * (i_d - 1.0 / x);
    t[2][0] = base * k * c_a * s_d * (1.0 / x - i_d);
    Ok(t)
}

/// Full tensor from the pre-contour `k_gamma` integrals with `p -> p + i eps`,
/// `eps = ctrl.eps_imag * p`. Modes are summed until `X sqrt(k_z^2 - p^2)`
/// exceeds `ctrl.exp_cutoff`.
pub fn planar_quadrature_tensor(
    p: f64,
    geom: &PlanarGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    ctrl: &SumControl,
) -> Result<Tensor3> {
    ctrl.validate()?;
    if !(1e-8..=1e-3).contains(&ctrl.eps_imag) {
        return Err(Error::InvalidInput(format!("eps_imag {} outside [1e-8, 1e-3]", ctrl.eps_imag)));
    }
    let f = canonical_frame(p, geom, r_a, r_d)?;
    // Last mode with X sqrt(k^2 - p^2) <= cutoff, plus a few beyond it.
    let k_last = (p * p + (ctrl.exp_cutoff / f.x).powi(2)).sqrt();
    let n_max = (k_last * geom.l / PI).ceil() as u64 + 3;
    if n_max > ctrl.max_terms {
        return Err(Error::NotConverged { terms: ctrl.max_terms, tail_bound: f64::INFINITY });
    }
    for n in 0..=n_max {
        let k = geom.k_z(n);
        check_resonance(p, p * p - k * k, n, ctrl.tol_res)?;
    }
    let rel_tol = ctrl.rel_tol.max(1e-12);
    let terms: Vec<Tensor3> = (0..=n_max)
        .into_par_iter()
        .map(|n| oracle_mode(p, ctrl.eps_imag * p, geom, f.x, f.z_a, f.z_d, n, rel_tol))
        .collect::<Result<_>>()?;
    let total = terms.iter().fold(ZERO, |acc, t| tensor::add(&acc, t));
    Ok(tensor::rotate(&tensor::rotation_z(f.angle), &total))
}

/// One component of [`planar_quadrature_tensor`] with default truncation.
pub fn coupling_planar_quadrature(
    p: f64,
    geom: &PlanarGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    eps_imag: f64,
    component: Component,
) -> Result<Complex64> {
    let ctrl = SumControl { eps_imag, exp_cutoff: 25.0, rel_tol: 1e-9, ..SumControl::default() };
    Ok(component.get(&planar_quadrature_tensor(p, geom, r_a, r_d, &ctrl)?))
}
