//! Seeded random configurations checked against the quadrature oracles.

use std::f64::consts::PI;

use dipolecav::channel::{channel_quadrature_tensor, coupling_channel, ChannelGeometry};
use dipolecav::planar::{coupling_planar, planar_quadrature_tensor, PlanarGeometry};
use dipolecav::tensor::{max_abs, Component, Tensor3};
use dipolecav::SumControl;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OracleGeometry, OracleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCase {
    pub index: usize,
    /// Plate separation for planar, `(a, b)` for channel.
    pub l: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub r_a: [f64; 3],
    pub r_d: [f64; 3],
}

impl OracleCase {
    pub fn separation(&self) -> f64 {
        (self.r_a[0] - self.r_d[0]).hypot(self.r_a[1] - self.r_d[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub case: OracleCase,
    pub component: Component,
    pub closed: Complex64,
    pub oracle: Complex64,
    /// `|closed - oracle|` over `max(|oracle|, 1e-3 max_ij |oracle_ij|)`.
    pub rel_err: f64,
    pub status: &'static str,
}

/// Widths `w` (in units of `pi/p`) with every `n/w` at least 5% from 1, so no
/// single-index mode sits on resonance.
fn detuned_width(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let w: f64 = rng.gen_range(lo..hi);
        if (1..8).all(|n| (n as f64 / w - 1.0).abs() > 0.05) {
            return w;
        }
    }
}

fn channel_detuned(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let (a, b) = (rng.gen_range(0.8..1.6), rng.gen_range(0.8..1.6));
        let close = (0..6).any(|m| {
            (0..6).any(|n| {
                let k2 = (m as f64 / a).powi(2) + (n as f64 / b).powi(2);
                (m, n) != (0, 0) && (k2 - 1.0).abs() < 0.05
            })
        });
        if !close {
            return (a, b);
        }
    }
}

/// The random configurations for a spec, with `pX` log-uniform in [0.1, 10].
pub fn cases(spec: &OracleSpec) -> Vec<OracleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let unit = PI / spec.p;
    (0..spec.count)
        .map(|index| {
            let x = 10f64.powf(rng.gen_range(-1.0..1.0)) / spec.p;
            match spec.geometry {
                OracleGeometry::Planar => {
                    let l = detuned_width(&mut rng, 0.5, 3.0) * unit;
                    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                    let (z_a, z_d) = (rng.gen_range(0.05..0.95) * l, rng.gen_range(0.05..0.95) * l);
                    OracleCase {
                        index,
                        l: Some(l),
                        a: None,
                        b: None,
                        r_a: [x * phi.cos(), x * phi.sin(), z_a],
                        r_d: [0.0, 0.0, z_d],
                    }
                }
                OracleGeometry::Channel => {
                    let (a, b) = channel_detuned(&mut rng);
                    let (a, b) = (a * unit, b * unit);
                    let mut pos = || [rng.gen_range(0.05..0.95) * a, rng.gen_range(0.05..0.95) * b];
                    let (ta, td) = (pos(), pos());
                    OracleCase { index, l: None, a: Some(a), b: Some(b), r_a: [x, ta[0], ta[1]], r_d: [0.0, td[0], td[1]] }
                }
            }
        })
        .collect()
}

fn tensors(spec: &OracleSpec, case: &OracleCase) -> dipolecav::Result<(Tensor3, Tensor3)> {
    let closed_ctrl = SumControl { max_terms: spec.ctrl.max_terms, tol_res: spec.ctrl.tol_res, ..SumControl::default() };
    match spec.geometry {
        OracleGeometry::Planar => {
            let g = PlanarGeometry::new(case.l.unwrap_or(f64::NAN), spec.permittivity)?;
            Ok((
                coupling_planar(spec.p, &g, case.r_a, case.r_d, &closed_ctrl)?.total,
                planar_quadrature_tensor(spec.p, &g, case.r_a, case.r_d, &spec.ctrl)?,
            ))
        }
        OracleGeometry::Channel => {
            let g = ChannelGeometry::new(case.a.unwrap_or(f64::NAN), case.b.unwrap_or(f64::NAN), spec.permittivity)?;
            Ok((
                coupling_channel(spec.p, &g, case.r_a, case.r_d, &closed_ctrl)?.total,
                channel_quadrature_tensor(spec.p, &g, case.r_a, case.r_d, &spec.ctrl, spec.modes)?,
            ))
        }
    }
}

/// Closed form against quadrature for every case and requested component.
pub fn run_oracle(spec: &OracleSpec) -> Vec<OracleRow> {
    let cases = cases(spec);
    let per_case: Vec<Vec<OracleRow>> = cases
        .par_iter()
        .map(|case| match tensors(spec, case) {
            Ok((closed, oracle)) => {
                let floor = 1e-3 * max_abs(&oracle);
                spec.components
                    .iter()
                    .map(|&c| {
                        let (vc, vo) = (c.get(&closed), c.get(&oracle));
                        let rel_err = (vc - vo).norm() / vo.norm().max(floor);
                        let status = if rel_err <= spec.tol { "ok" } else { "mismatch" };
                        OracleRow { case: *case, component: c, closed: vc, oracle: vo, rel_err, status }
                    })
                    .collect()
            }
            Err(e) => {
                let nan = Complex64::new(f64::NAN, f64::NAN);
                spec.components
                    .iter()
                    .map(|&c| OracleRow {
                        case: *case,
                        component: c,
                        closed: nan,
                        oracle: nan,
                        rel_err: f64::NAN,
                        status: e.status_tag(),
                    })
                    .collect()
            }
        })
        .collect();
    per_case.into_iter().flatten().collect()
}
