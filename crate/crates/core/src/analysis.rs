//! Separation sweeps, local power-law exponents and cavity/free-space ratios.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{coupling_channel, ChannelGeometry};
use crate::freespace::{check_positive, coupling_free1d, coupling_free2d, coupling_free3d};
use crate::planar::{coupling_planar, PlanarGeometry};
use crate::tensor::{Component, Tensor3, ZERO};
use crate::{CouplingResult, Error, Result, SumControl};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Free3d { permittivity: f64 },
    /// Layer of thickness `l`; the scalar coupling fills the diagonal.
    Free2d { l: f64, permittivity: f64 },
    /// Wire of cross-section `a x b`; the scalar coupling fills the diagonal.
    Free1d { a: f64, b: f64, permittivity: f64 },
    Planar(PlanarGeometry),
    Channel(ChannelGeometry),
}

impl Geometry {
    pub fn permittivity(&self) -> f64 {
        match *self {
            Geometry::Free3d { permittivity }
            | Geometry::Free2d { permittivity, .. }
            | Geometry::Free1d { permittivity, .. } => permittivity,
            Geometry::Planar(g) => g.permittivity,
            Geometry::Channel(g) => g.permittivity,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Free3d { .. } => "free3d",
            Geometry::Free2d { .. } => "free2d",
            Geometry::Free1d { .. } => "free1d",
            Geometry::Planar(_) => "planar",
            Geometry::Channel(_) => "channel",
        }
    }
}

/// Transverse coordinates of the two species. The donor sits at `x = 0` and
/// the acceptor at `x = X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Placement {
    pub y_a: f64,
    pub z_a: f64,
    pub y_d: f64,
    pub z_d: f64,
}

impl Placement {
    /// Both species on the axis of the geometry.
    pub fn centered(geometry: &Geometry) -> Self {
        let (y, z) = match *geometry {
            Geometry::Planar(g) => (0.0, g.l / 2.0),
            Geometry::Channel(g) => (g.a / 2.0, g.b / 2.0),
            _ => (0.0, 0.0),
        };
        Placement { y_a: y, z_a: z, y_d: y, z_d: z }
    }

    pub fn positions(&self, x: f64) -> ([f64; 3], [f64; 3]) {
        ([x, self.y_a, self.z_a], [0.0, self.y_d, self.z_d])
    }

    /// Shortest distance from either species to a wall, where the cavity
    /// starts to differ from free space.
    pub fn wall_distance(&self, geometry: &Geometry) -> Option<f64> {
        let span = |lo: f64, hi: f64, v: f64| (v - lo).min(hi - v);
        match *geometry {
            Geometry::Planar(g) => Some(span(0.0, g.l, self.z_a).min(span(0.0, g.l, self.z_d))),
            Geometry::Channel(g) => Some(
                [span(0.0, g.a, self.y_a), span(0.0, g.a, self.y_d), span(0.0, g.b, self.z_a), span(0.0, g.b, self.z_d)]
                    .into_iter()
                    .fold(f64::INFINITY, f64::min),
            ),
            _ => None,
        }
    }
}

/// Log-spaced separations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl XGrid {
    pub fn validate(&self) -> Result<()> {
        check_positive("x_min", self.min)?;
        check_positive("x_max", self.max)?;
        if self.count < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {}", self.count)));
        }
        if !(self.max > self.min) {
            return Err(Error::InvalidInput(format!("x_max {} must exceed x_min {}", self.max, self.min)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let last = self.count - 1;
        (0..self.count)
            .map(|k| match k {
                0 => self.min,
                k if k == last => self.max,
                k => (lo + (hi - lo) * k as f64 / last as f64).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub geometry: Geometry,
    pub p: f64,
    pub placement: Placement,
    pub x_grid: XGrid,
    pub components: Vec<Component>,
    pub ctrl: SumControl,
    /// Points in the local-exponent fit window.
    pub window: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("p", self.p)?;
        self.x_grid.validate()?;
        self.ctrl.validate()?;
        if self.components.is_empty() {
            return Err(Error::InvalidInput("no tensor components requested".into()));
        }
        check_window(self.window)?;
        if self.x_grid.count < self.window {
            return Err(Error::InvalidInput(format!(
                "{} points is fewer than the window {}",
                self.x_grid.count, self.window
            )));
        }
        Ok(())
    }
}

/// Tensor at one separation. For free space in 3D `rd` and `nrd` carry the
/// two time orderings (donor emits, acceptor emits); for the reduced 2D and
/// 1D forms the whole coupling is the single propagating mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResult {
    pub total: Tensor3,
    pub rd: Tensor3,
    pub nrd: Tensor3,
    pub terms_used: u64,
    pub status: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSeries {
    pub component: Component,
    pub x: Vec<f64>,
    /// `-d ln|V| / d ln X`; NaN where undefined.
    pub n: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub x: Vec<f64>,
    pub points: Vec<PointResult>,
    pub exponents: Vec<ExponentSeries>,
    pub wall_distance: Option<f64>,
}

impl SweepResult {
    pub fn all_ok(&self) -> bool {
        self.points.iter().all(|p| p.status == "ok")
    }
}

fn diagonal(v: Complex64) -> Tensor3 {
    let mut t = ZERO;
    for i in 0..3 {
        t[i][i] = v;
    }
    t
}

/// Coupling tensor for any geometry with the acceptor at `r_a` and the donor at `r_d`.
pub fn evaluate(geometry: &Geometry, p: f64, r_a: [f64; 3], r_d: [f64; 3], ctrl: &SumControl) -> Result<CouplingResult> {
    let sep = [r_a[0] - r_d[0], r_a[1] - r_d[1], r_a[2] - r_d[2]];
    let scalar = |v: Complex64| {
        let t = diagonal(v);
        CouplingResult { rd: t, nrd: ZERO, total: t, terms_used: 1, converged: true, tail_bound: 0.0 }
    };
    match *geometry {
        Geometry::Free3d { permittivity } => {
            let f = coupling_free3d(p, sep, permittivity)?;
            Ok(CouplingResult { rd: f.v_plus, nrd: f.v_minus, total: f.total, terms_used: 0, converged: true, tail_bound: 0.0 })
        }
        Geometry::Free2d { l, permittivity } => Ok(scalar(coupling_free2d(p, sep[0].hypot(sep[1]), l, permittivity)?)),
        Geometry::Free1d { a, b, permittivity } => Ok(scalar(coupling_free1d(p, sep[0].abs(), a, b, permittivity)?)),
        Geometry::Planar(g) => coupling_planar(p, &g, r_a, r_d, ctrl),
        Geometry::Channel(g) => coupling_channel(p, &g, r_a, r_d, ctrl),
    }
}

fn check_window(window: usize) -> Result<()> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidInput(format!("exponent window must be odd and >= 3, got {window}")));
    }
    Ok(())
}

/// Local exponent `n = -d ln|V| / d ln X` from a least-squares line over a
/// centered window, shifted inward at the ends. Points whose window holds a
/// zero or non-finite magnitude get NaN.
pub fn local_exponent(x: &[f64], magnitude: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(window)?;
    if x.len() != magnitude.len() {
        return Err(Error::InvalidInput("x and |V| differ in length".into()));
    }
    if x.len() < window {
        return Err(Error::InvalidInput(format!("{} points is fewer than the window {window}", x.len())));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) || !(x[0] > 0.0) {
        return Err(Error::InvalidInput("x must be positive and strictly increasing".into()));
    }
    let half = window / 2;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = magnitude.iter().map(|v| if *v > 0.0 && v.is_finite() { v.ln() } else { f64::NAN }).collect();
    Ok((0..x.len())
        .map(|k| {
            let start = k.saturating_sub(half).min(x.len() - window);
            let (wx, wy) = (&lx[start..start + window], &ly[start..start + window]);
            if wy.iter().any(|v| v.is_nan()) {
                return f64::NAN;
            }
            let mx = wx.iter().sum::<f64>() / window as f64;
            let my = wy.iter().sum::<f64>() / window as f64;
            let sxy: f64 = wx.iter().zip(wy).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = wx.iter().map(|a| (a - mx) * (a - mx)).sum();
            -sxy / sxx
        })
        .collect())
}

fn failed(status: &'static str) -> PointResult {
    let t = [[Complex64::new(f64::NAN, f64::NAN); 3]; 3];
    PointResult { total: t, rd: t, nrd: t, terms_used: 0, status }
}

fn evaluate_point(spec: &SweepSpec, x: f64) -> PointResult {
    let (r_a, r_d) = spec.placement.positions(x);
    match evaluate(&spec.geometry, spec.p, r_a, r_d, &spec.ctrl) {
        Ok(r) => PointResult { total: r.total, rd: r.rd, nrd: r.nrd, terms_used: r.terms_used, status: "ok" },
        Err(e) => failed(e.status_tag()),
    }
}

/// Evaluates every grid point; failures are recorded per point. Results are
/// in grid order whatever the thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let x = spec.x_grid.points();
    if x.len() < spec.window {
        return Err(Error::InvalidInput(format!("{} grid points is fewer than the window {}", x.len(), spec.window)));
    }
    let points: Vec<PointResult> = x.par_iter().map(|&xk| evaluate_point(spec, xk)).collect();
    let exponents = spec
        .components
        .iter()
        .map(|&c| {
            let mag: Vec<f64> = points.iter().map(|p| c.get(&p.total).norm()).collect();
            Ok(ExponentSeries { component: c, x: x.clone(), n: local_exponent(&x, &mag, spec.window)? })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { spec: spec.clone(), x, points, exponents, wall_distance: spec.placement.wall_distance(&spec.geometry) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnhancementSeries {
    pub component: Component,
    pub x: Vec<f64>,
    /// `|V_cavity| / |V_free|`, NaN where the cavity evaluation failed.
    pub ratio: Vec<f64>,
    pub status: Vec<&'static str>,
}

/// Cavity coupling over the 3D free-space coupling with the same `p`,
/// permittivity and separation vector.
pub fn enhancement_ratio(
    geometry: &Geometry,
    p: f64,
    placement: &Placement,
    x_grid: &XGrid,
    component: Component,
    ctrl: &SumControl,
) -> Result<EnhancementSeries> {
    check_positive("p", p)?;
    x_grid.validate()?;
    ctrl.validate()?;
    let x = x_grid.points();
    let eps = geometry.permittivity();
    let pairs: Vec<(f64, &'static str)> = x
        .par_iter()
        .map(|&xk| {
            let (r_a, r_d) = placement.positions(xk);
            let sep = [r_a[0] - r_d[0], r_a[1] - r_d[1], r_a[2] - r_d[2]];
            let cav = evaluate(geometry, p, r_a, r_d, ctrl).map(|r| component.get(&r.total).norm());
            let free = coupling_free3d(p, sep, eps).map(|f| component.get(&f.total).norm());
            match (cav, free) {
                (Ok(c), _) if c == 0.0 => (0.0, "ok"),
                (Ok(c), Ok(f)) => (c / f, "ok"),
                (Err(e), _) | (_, Err(e)) => (f64::NAN, e.status_tag()),
            }
        })
        .collect();
    let (ratio, status) = pairs.into_iter().unzip();
    Ok(EnhancementSeries { component, x, ratio, status })
}

/// Near field below `pX = 0.1`, far field above `pX = 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NearField,
    Transition,
    FarField,
}

pub fn regime(p: f64, x: f64) -> Regime {
    match p * x {
        px if px < 0.1 => Regime::NearField,
        px if px > 10.0 => Regime::FarField,
        _ => Regime::Transition,
    }
}

/// `|rd| / (|rd| + |nrd|)` for one component.
pub fn rd_fraction(point: &PointResult, component: Component) -> f64 {
    let rd = component.get(&point.rd).norm();
    let nrd = component.get(&point.nrd).norm();
    rd / (rd + nrd)
}
