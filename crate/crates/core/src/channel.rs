//! Perfectly conducting rectangular channel, walls at `y = 0, a` and
//! `z = 0, b`, open along `x`.
//!
//! The double mode sum runs over `k_y = m pi / a`, `k_z = n pi / b` in shells
//! of increasing `k_eta = sqrt(k_y^2 + k_z^2)`. Shells are summed one at a time
//! and in order, so the total is independent of the thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::freespace::check_positive;
use crate::quad::{integrate, CVec, QuadOptions};
use crate::tensor::{self, Component, Tensor3, ZERO};
use crate::{CouplingResult, Error, Result, SumControl};

/// Smallest axial separation accepted, in units of `1/p`.
pub const MIN_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGeometry {
    /// Width along `y`.
    pub a: f64,
    /// Width along `z`.
    pub b: f64,
    pub permittivity: f64,
}

impl ChannelGeometry {
    pub fn new(a: f64, b: f64, permittivity: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        check_positive("permittivity", permittivity)?;
        Ok(ChannelGeometry { a, b, permittivity })
    }

    fn shell_width(&self) -> f64 {
        (PI / self.a).min(PI / self.b)
    }
}

/// One `(m, n)` term of a channel mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelTerm {
    pub m: u64,
    pub n: u64,
    pub k_eta: f64,
    pub value: Complex64,
    pub is_rd: bool,
}

/// Which mode functions the quadrature oracle uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSet {
    /// TM mode with `E_z ∝ +i k_x k_z / k_eta^2`, so that `div E = 0`.
    #[default]
    Transverse,
    /// TM mode with the opposite `E_z` sign, not divergence-free.
    FlippedTm,
}

/// `sin`/`cos` of `k y` for one transverse coordinate pair, tabulated by index.
struct Trig {
    step: f64,
    at_a: f64,
    at_d: f64,
    table: Vec<[f64; 4]>,
}

impl Trig {
    fn new(step: f64, at_a: f64, at_d: f64, len: usize) -> Self {
        let mut t = Trig { step, at_a, at_d, table: Vec::new() };
        t.extend(len);
        t
    }

    fn extend(&mut self, len: usize) {
        for i in self.table.len()..len {
            let k = i as f64 * self.step;
            let (sa, ca) = (k * self.at_a).sin_cos();
            let (sd, cd) = (k * self.at_d).sin_cos();
            self.table.push([sa, ca, sd, cd]);
        }
    }

    /// `[sin(k y_A), cos(k y_A), sin(k y_D), cos(k y_D)]`.
    fn get(&self, i: u64) -> [f64; 4] {
        self.table[i as usize]
    }
}

struct Setup<'a> {
    p: f64,
    geom: &'a ChannelGeometry,
    /// `x_A - x_D`.
    x: f64,
    ty: Trig,
    tz: Trig,
    tol_res: f64,
}

impl Setup<'_> {
    fn ensure(&mut self, k_max: f64) {
        self.ty.extend((k_max * self.geom.a / PI) as usize + 2);
        self.tz.extend((k_max * self.geom.b / PI) as usize + 2);
    }

    /// Closed-form tensor contribution of mode `(m, n)`.
    fn mode(&self, m: u64, n: u64) -> Result<(Tensor3, bool, f64)> {
        let g = self.geom;
        let ky = m as f64 * PI / g.a;
        let kz = n as f64 * PI / g.b;
        let k2 = ky * ky + kz * kz;
        let p2 = self.p * self.p;
        let detune = p2 - k2;
        if detune == 0.0 || detune.abs() < self.tol_res * p2 {
            return Err(Error::Resonant { mode: (m, n), detuning: detune.abs() / p2 });
        }
        let t = summand(self.p, g, ky, kz, self.x, self.ty.get(m), self.tz.get(n));
        Ok((t, detune > 0.0, k2.sqrt()))
    }

    fn shell_of(&self, m: u64, n: u64) -> u64 {
        let ky = m as f64 * PI / self.geom.a;
        let kz = n as f64 * PI / self.geom.b;
        ((ky * ky + kz * kz).sqrt() / self.geom.shell_width()) as u64
    }

    /// Modes of shell `s`, ordered by `m` then `n`.
    fn shell_modes(&self, s: u64) -> Vec<(u64, u64)> {
        let w = self.geom.shell_width();
        let (lo, hi) = (s as f64 * w, (s + 1) as f64 * w);
        let dy = PI / self.geom.a;
        let dz = PI / self.geom.b;
        let mut out = Vec::new();
        let m_max = (hi / dy) as u64 + 1;
        for m in 0..=m_max {
            let ky = m as f64 * dy;
            if ky > hi {
                break;
            }
            let n_lo = ((lo * lo - ky * ky).max(0.0).sqrt() / dz) as u64;
            let n_hi = ((hi * hi - ky * ky).max(0.0).sqrt() / dz) as u64 + 1;
            for n in n_lo.saturating_sub(1)..=n_hi {
                if (m, n) != (0, 0) && self.shell_of(m, n) == s {
                    out.push((m, n));
                }
            }
        }
        out
    }

    fn shell(&self, s: u64, pick: Option<Component>) -> Result<Shell> {
        let mut sh = Shell { rd: ZERO, nrd: ZERO, count: 0, terms: Vec::new() };
        for (m, n) in self.shell_modes(s) {
            let (t, is_rd, k_eta) = self.mode(m, n)?;
            let part = if is_rd { &mut sh.rd } else { &mut sh.nrd };
            for i in 0..3 {
                for j in 0..3 {
                    part[i][j] += t[i][j];
                }
            }
            sh.count += 1;
            if let Some(c) = pick {
                sh.terms.push(ChannelTerm { m, n, k_eta, value: c.get(&t), is_rd });
            }
        }
        Ok(sh)
    }

    /// Number of modes with `k_eta < k`.
    fn modes_below(&self, k: f64) -> u64 {
        let dy = PI / self.geom.a;
        let dz = PI / self.geom.b;
        let mut count = 0;
        let mut m = 0u64;
        while (m as f64 * dy) < k {
            let ky = m as f64 * dy;
            count += ((k * k - ky * ky).sqrt() / dz) as u64 + 1;
            m += 1;
        }
        count - 1
    }
}

fn summand(p: f64, g: &ChannelGeometry, ky: f64, kz: f64, x: f64, ty: [f64; 4], tz: [f64; 4]) -> Tensor3 {
    let k2 = ky * ky + kz * kz;
    let p2 = p * p;
    let detune = p2 - k2;
    let xa = x.abs();
    // e^{i v X} and 1/v, with v = i q on the evanescent side.
    let (phase, inv_v) = if detune > 0.0 {
        let v = detune.sqrt();
        (Complex64::from_polar(1.0, v * xa), Complex64::new(1.0 / v, 0.0))
    } else {
        let q = (-detune).sqrt();
        (Complex64::new((-q * xa).exp(), 0.0), Complex64::new(0.0, -1.0 / q))
    };
    let [sya, cya, syd, cyd] = ty;
    let [sza, cza, szd, czd] = tz;
    let scale = 2.0 / (g.permittivity * g.a * g.b);
    // -2i/(eps a b) e^{ivX}/v and -2/(eps a b) e^{ivX}.
    let even = Complex64::new(0.0, -scale) * phase * inv_v;
    let odd = -scale * phase * x.signum();
    let mut t = ZERO;
    t[0][0] = even * (sya * sza * syd * szd * k2);
    t[1][1] = even * (cya * sza * cyd * szd * (p2 - ky * ky));
    t[2][2] = even * (sya * cza * syd * czd * (p2 - kz * kz));
    t[0][1] = odd * (sya * sza * cyd * szd * ky);
    t[0][2] = odd * (sya * sza * syd * czd * kz);
    t[1][2] = even * (cya * sza * syd * czd * ky * kz);
    // V_ji(A, D) = V_ij(D, A); the odd entries also flip with X.
    t[1][0] = -odd * (syd * szd * cya * sza * ky);
    t[2][0] = -odd * (syd * szd * sya * cza * kz);
    t[2][1] = even * (cyd * szd * sya * cza * ky * kz);
    t
}

/// A single summand of the channel sum at arbitrary `(k_y, k_z)`, with the
/// transverse factors given directly: `ty = [sin k_y y_A, cos k_y y_A,
/// sin k_y y_D, cos k_y y_D]`, `tz` likewise in `z`.
pub fn channel_summand(
    p: f64,
    geom: &ChannelGeometry,
    k_y: f64,
    k_z: f64,
    x: f64,
    ty: [f64; 4],
    tz: [f64; 4],
) -> Result<Tensor3> {
    check_positive("p", p)?;
    if p * p == k_y * k_y + k_z * k_z {
        return Err(Error::InvalidInput("summand is singular at k_eta = p".into()));
    }
    Ok(summand(p, geom, k_y, k_z, x, ty, tz))
}

struct Shell {
    rd: Tensor3,
    nrd: Tensor3,
    count: u64,
    terms: Vec<ChannelTerm>,
}

fn check_inside(geom: &ChannelGeometry, r: [f64; 3], who: &str) -> Result<()> {
    if r[1] > 0.0 && r[1] < geom.a && r[2] > 0.0 && r[2] < geom.b {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{who} at (y, z) = ({}, {}) must lie strictly inside (0, {}) x (0, {})",
            r[1], r[2], geom.a, geom.b
        )))
    }
}

fn validate(p: f64, geom: &ChannelGeometry, r_a: [f64; 3], r_d: [f64; 3], ctrl: &SumControl) -> Result<f64> {
    check_positive("p", p)?;
    ctrl.validate()?;
    check_inside(geom, r_a, "acceptor")?;
    check_inside(geom, r_d, "donor")?;
    let x = r_a[0] - r_d[0];
    if !(x.abs() >= MIN_SEPARATION / p) {
        return Err(Error::ZeroSeparation { separation: x.abs(), minimum: MIN_SEPARATION / p });
    }
    Ok(x)
}

fn tail_estimate(last: f64, s: u64, w: f64, x: f64) -> f64 {
    let sf = s.max(1) as f64;
    let rho = (-w * x.abs()).exp() * (1.0 + 2.0 / sf).powi(2);
    if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

fn channel_sum(
    p: f64,
    geom: &ChannelGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    ctrl: &SumControl,
    pick: Option<Component>,
    mut visit: impl FnMut(Vec<ChannelTerm>),
) -> Result<CouplingResult> {
    let x = validate(p, geom, r_a, r_d, ctrl)?;
    let w = geom.shell_width();
    // Shells whose inner edge still has X sqrt(k^2 - p^2) <= cutoff, plus three.
    let k_cut = (p * p + (ctrl.exp_cutoff / x.abs()).powi(2)).sqrt();
    let s_first = (k_cut / w).ceil() as u64 + 3;
    let k_first = (s_first + 1) as f64 * w;
    let planned = {
        let probe = Setup {
            p,
            geom,
            x,
            ty: Trig::new(PI / geom.a, r_a[1], r_d[1], 0),
            tz: Trig::new(PI / geom.b, r_a[2], r_d[2], 0),
            tol_res: ctrl.tol_res,
        };
        probe.modes_below(k_first)
    };
    if planned > ctrl.max_terms {
        return Err(Error::NotConverged { terms: ctrl.max_terms, tail_bound: f64::INFINITY });
    }
    let mut setup = Setup {
        p,
        geom,
        x,
        ty: Trig::new(PI / geom.a, r_a[1], r_d[1], 0),
        tz: Trig::new(PI / geom.b, r_a[2], r_d[2], 0),
        tol_res: ctrl.tol_res,
    };
    setup.ensure(k_first + w);

    let shells: Vec<Shell> = (0..s_first).into_par_iter().map(|s| setup.shell(s, pick)).collect::<Result<_>>()?;

    let mut rd = ZERO;
    let mut nrd = ZERO;
    let mut terms_used = 0u64;
    let mut small_run = 0;
    let mut last = 0.0;
    let mut absorb = |sh: Shell, rd: &mut Tensor3, nrd: &mut Tensor3, used: &mut u64| -> f64 {
        *rd = tensor::add(rd, &sh.rd);
        *nrd = tensor::add(nrd, &sh.nrd);
        *used += sh.count;
        if pick.is_some() {
            visit(sh.terms);
        }
        tensor::max_abs(&tensor::add(&sh.rd, &sh.nrd))
    };
    for sh in shells {
        last = absorb(sh, &mut rd, &mut nrd, &mut terms_used);
        let scale = tensor::max_abs(&tensor::add(&rd, &nrd));
        small_run = if last <= ctrl.rel_tol * scale { small_run + 1 } else { 0 };
    }
    let mut s = s_first;
    while small_run < 3 {
        if terms_used >= ctrl.max_terms {
            return Err(Error::NotConverged { terms: terms_used, tail_bound: tail_estimate(last, s, w, x) });
        }
        setup.ensure((s + 2) as f64 * w);
        let sh = setup.shell(s, pick)?;
        last = absorb(sh, &mut rd, &mut nrd, &mut terms_used);
        let scale = tensor::max_abs(&tensor::add(&rd, &nrd));
        small_run = if last <= ctrl.rel_tol * scale { small_run + 1 } else { 0 };
        s += 1;
    }
    let total = tensor::add(&rd, &nrd);
    Ok(CouplingResult { rd, nrd, total, terms_used, converged: true, tail_bound: tail_estimate(last, s, w, x) })
}

/// Coupling tensor between an acceptor at `r_a` and a donor at `r_d`.
pub fn coupling_channel(
    p: f64,
    geom: &ChannelGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    ctrl: &SumControl,
) -> Result<CouplingResult> {
    channel_sum(p, geom, r_a, r_d, ctrl, None, |_| {})
}

/// The individual `(m, n)` terms behind one component of [`coupling_channel`],
/// in summation order.
pub fn channel_sum_terms(
    p: f64,
    geom: &ChannelGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    component: Component,
    ctrl: &SumControl,
) -> Result<Vec<ChannelTerm>> {
    let mut out = Vec::new();
    channel_sum(p, geom, r_a, r_d, ctrl, Some(component), |t| out.extend(t))?;
    Ok(out)
}

/// One `(m, n)` mode of the `k_x` line integral, with everything that does
/// not depend on `k_x` precomputed.
struct ModeIntegrand {
    p: Complex64,
    ky: f64,
    kz: f64,
    k_eta2: f64,
    tm_z_sign: f64,
    x: f64,
    /// `[sin(k_y y), cos(k_y y), sin(k_z z), cos(k_z z)]` at the acceptor and donor.
    at_a: [f64; 4],
    at_d: [f64; 4],
}

impl ModeIntegrand {
    fn new(p: Complex64, geom: &ChannelGeometry, m: u64, n: u64, r_a: [f64; 3], r_d: [f64; 3], modes: ModeSet) -> Self {
        let ky = m as f64 * PI / geom.a;
        let kz = n as f64 * PI / geom.b;
        let trig = |r: [f64; 3]| {
            let (sy, cy) = (ky * r[1]).sin_cos();
            let (sz, cz) = (kz * r[2]).sin_cos();
            [sy, cy, sz, cz]
        };
        ModeIntegrand {
            p,
            ky,
            kz,
            k_eta2: ky * ky + kz * kz,
            tm_z_sign: if modes == ModeSet::Transverse { 1.0 } else { -1.0 },
            x: r_a[0] - r_d[0],
            at_a: trig(r_a),
            at_d: trig(r_d),
        }
    }

    /// `(TE, TM)` profiles; `conj` flips the explicit factors of `i`.
    fn profiles(&self, kx: Complex64, k: Complex64, trig: [f64; 4], conj: bool) -> [[Complex64; 3]; 2] {
        let [sy, cy, sz, cz] = trig;
        let i = if conj { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
        let inv = 1.0 / self.k_eta2;
        let zero = Complex64::new(0.0, 0.0);
        let te = [zero, -i * k * (self.kz * inv * cy * sz), i * k * (self.ky * inv * sy * cz)];
        let tm = [
            Complex64::new(sy * sz, 0.0),
            i * kx * (self.ky * inv * cy * sz),
            i * kx * (self.tm_z_sign * self.kz * inv * sy * cz),
        ];
        [te, tm]
    }

    /// The two time orderings, `e^{+i k_x X}` first.
    fn eval(&self, kx: Complex64, forward: bool, backward: bool) -> (CVec<9>, CVec<9>) {
        let zero = CVec([Complex64::new(0.0, 0.0); 9]);
        if self.k_eta2 == 0.0 {
            return (zero, zero);
        }
        let k = (kx * kx + self.k_eta2).sqrt();
        let weight = 2.0 * self.k_eta2 / k;
        let ikx = Complex64::new(0.0, 1.0) * kx * self.x;
        let mut f = zero;
        let mut g = zero;
        if forward {
            let w = weight * ikx.exp() / (self.p - k);
            let a = self.profiles(kx, k, self.at_a, false);
            let d = self.profiles(kx, k, self.at_d, true);
            outer(&mut f, &a, &d, w);
        }
        if backward {
            let w = weight * (-ikx).exp() / (-self.p - k);
            let a = self.profiles(kx, k, self.at_a, true);
            let d = self.profiles(kx, k, self.at_d, false);
            outer(&mut g, &a, &d, w);
        }
        (f, g)
    }
}

fn outer(out: &mut CVec<9>, a: &[[Complex64; 3]; 2], d: &[[Complex64; 3]; 2], w: Complex64) {
    for pol in 0..2 {
        for i in 0..3 {
            let ai = a[pol][i] * w;
            for j in 0..3 {
                out.0[3 * i + j] += ai * d[pol][j];
            }
        }
    }
}

fn unflatten(v: &CVec<9>) -> Tensor3 {
    let mut t = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = v.0[3 * i + j];
        }
    }
    t
}

/// Integrand of the `k_x` line integral for mode `(m, n)`, split into the two
/// time orderings (`e^{+i k_x X}` first). Vanishes identically for
/// `(m, n) = (0, 0)`.
pub fn channel_mode_integrand(
    p: Complex64,
    geom: &ChannelGeometry,
    m: u64,
    n: u64,
    r_a: [f64; 3],
    r_d: [f64; 3],
    kx: Complex64,
    modes: ModeSet,
) -> (Tensor3, Tensor3) {
    let (f, g) = ModeIntegrand::new(p, geom, m, n, r_a, r_d, modes).eval(kx, true, true);
    (unflatten(&f), unflatten(&g))
}

/// `int dk_x` of [`channel_mode_integrand`] for one mode and `x_A > x_D`:
/// the real segment `[-K, K]` plus four vertical rays on which the
/// exponentials decay.
fn oracle_mode(
    p: Complex64,
    geom: &ChannelGeometry,
    m: u64,
    n: u64,
    r_a: [f64; 3],
    r_d: [f64; 3],
    modes: ModeSet,
    opts: &QuadOptions,
) -> Result<CVec<9>> {
    let mode = ModeIntegrand::new(p, geom, m, n, r_a, r_d, modes);
    let x = mode.x;
    let k_eta = mode.k_eta2.sqrt();
    let edge = 1.5 * p.re.max(k_eta) + 1.0 / x;
    let both = |kx: f64| {
        let (f, g) = mode.eval(Complex64::new(kx, 0.0), true, true);
        f + g
    };
    let v = (p * p - mode.k_eta2).sqrt();
    let mut breaks = vec![0.0];
    if v.re > v.im.abs() {
        for w in [0.0, 1.0, 10.0, 100.0, 1e3, 1e4] {
            let d = w * v.im.abs();
            breaks.extend([v.re - d, v.re + d, -v.re - d, -v.re + d]);
        }
    }
    let mut total = integrate(both, -edge, edge, &breaks, opts)?.value;
    let reach = 36.0 / x;
    let ray_breaks = [2.0 / x, 8.0 / x];
    let i = Complex64::new(0.0, 1.0);
    // (start, direction, forward ordering?); dk_x = direction ds.
    let rays = [(edge, i, true), (-edge, i, true), (edge, -i, false), (-edge, -i, false)];
    for (start, dir, forward) in rays {
        let ray = |s: f64| {
            let kx = Complex64::new(start, 0.0) + dir * s;
            let (f, g) = mode.eval(kx, forward, !forward);
            if forward { f } else { g }
        };
        let mut r = integrate(ray, 0.0, reach, &ray_breaks, opts)?.value;
        // Tails run outward from the segment ends: +K upward/downward adds, -K subtracts.
        let factor = if start > 0.0 { dir } else { -dir };
        r.0.iter_mut().for_each(|c| *c *= factor);
        total = total + r;
    }
    Ok(total)
}

/// Full tensor from the `k_x` line integrals of the mode functions with
/// `p -> p + i eps`, `eps = ctrl.eps_imag * p`, summed over modes with
/// `X sqrt(k_eta^2 - p^2) <= ctrl.exp_cutoff`.
pub fn channel_quadrature_tensor(
    p: f64,
    geom: &ChannelGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    ctrl: &SumControl,
    modes: ModeSet,
) -> Result<Tensor3> {
    let x = validate(p, geom, r_a, r_d, ctrl)?;
    if !(1e-8..=1e-3).contains(&ctrl.eps_imag) {
        return Err(Error::InvalidInput(format!("eps_imag {} outside [1e-8, 1e-3]", ctrl.eps_imag)));
    }
    if x < 0.0 {
        // Reciprocity: V(A, D) = V(D, A)^T.
        return Ok(tensor::transpose(&channel_quadrature_tensor(p, geom, r_d, r_a, ctrl, modes)?));
    }
    let k_cut = (p * p + (ctrl.exp_cutoff / x).powi(2)).sqrt();
    let dy = PI / geom.a;
    let dz = PI / geom.b;
    let mut list = Vec::new();
    let mut m = 0u64;
    while m as f64 * dy <= k_cut {
        let ky = m as f64 * dy;
        let n_max = ((k_cut * k_cut - ky * ky).sqrt() / dz) as u64;
        for n in 0..=n_max {
            if (m, n) == (0, 0) {
                continue;
            }
            let detune = p * p - (ky * ky + (n as f64 * dz).powi(2));
            if detune == 0.0 || detune.abs() < ctrl.tol_res * p * p {
                return Err(Error::Resonant { mode: (m, n), detuning: detune.abs() / (p * p) });
            }
            list.push((m, n));
        }
        m += 1;
    }
    if list.len() as u64 > ctrl.max_terms {
        return Err(Error::NotConverged { terms: ctrl.max_terms, tail_bound: f64::INFINITY });
    }
    let pc = Complex64::new(p, ctrl.eps_imag * p);
    let scale = 2.0 * (p * p + k_cut * k_cut) / (geom.a * geom.b);
    let opts = QuadOptions { rel_tol: ctrl.rel_tol.max(1e-12), abs_tol: 1e-4 * ctrl.rel_tol * scale, max_intervals: 20_000 };
    let parts: Vec<CVec<9>> = list
        .par_iter()
        .map(|&(m, n)| oracle_mode(pc, geom, m, n, r_a, r_d, modes, &opts))
        .collect::<Result<_>>()?;
    let sum = parts.iter().fold(CVec([Complex64::new(0.0, 0.0); 9]), |acc, v| acc + *v);
    let norm = 1.0 / (2.0 * PI * geom.a * geom.b * geom.permittivity);
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = sum.0[3 * i + j] * norm;
        }
    }
    Ok(out)
}

/// One component of [`channel_quadrature_tensor`] with the transverse mode set.
pub fn coupling_channel_quadrature(
    p: f64,
    geom: &ChannelGeometry,
    r_a: [f64; 3],
    r_d: [f64; 3],
    eps_imag: f64,
    component: Component,
) -> Result<Complex64> {
    let ctrl = SumControl { eps_imag, exp_cutoff: 20.0, rel_tol: 1e-8, ..SumControl::default() };
    Ok(component.get(&channel_quadrature_tensor(p, geom, r_a, r_d, &ctrl, ModeSet::Transverse)?))
}
