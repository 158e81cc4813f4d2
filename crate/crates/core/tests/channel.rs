mod common;

use std::f64::consts::PI;

use common::{loglog_exponent, max_abs};
use dipolecav::channel::{
    channel_mode_integrand, channel_quadrature_tensor, channel_sum_terms, channel_summand, coupling_channel,
    coupling_channel_quadrature, ChannelGeometry, ModeSet,
};
use dipolecav::freespace::{coupling_free1d, coupling_free3d};
use dipolecav::tensor::{transpose, Component};
use dipolecav::SumControl;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Width of the channel with a single propagating mode per component.
fn w1() -> f64 {
    1.1 * 2f64.sqrt() * PI
}

fn square(a: f64) -> ChannelGeometry {
    ChannelGeometry::new(a, a, 1.0).unwrap()
}

fn ctrl_big() -> SumControl {
    SumControl { max_terms: 100_000_000, ..SumControl::default() }
}

fn centered(g: &ChannelGeometry, x: f64) -> ([f64; 3], [f64; 3]) {
    ([x, g.a / 2.0, g.b / 2.0], [0.0, g.a / 2.0, g.b / 2.0])
}

fn oracle_ctrl() -> SumControl {
    SumControl { eps_imag: 1e-8, exp_cutoff: 20.0, rel_tol: 1e-8, ..SumControl::default() }
}

/// Widths keeping every `k_eta` at least 5% away from `p = 1`.
fn detuned(rng: &mut ChaCha8Rng) -> ChannelGeometry {
    loop {
        let (a, b) = (rng.gen_range(0.8..2.0) * PI, rng.gen_range(0.8..2.0) * PI);
        let close = (0..4).any(|m| {
            (0..4).any(|n| {
                let k2 = (m as f64 * PI / a).powi(2) + (n as f64 * PI / b).powi(2);
                (m, n) != (0, 0) && (k2 - 1.0).abs() < 0.05
            })
        });
        if !close {
            return ChannelGeometry::new(a, b, 1.0).unwrap();
        }
    }
}

#[test]
fn closed_form_against_mode_function_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let g = detuned(&mut rng);
        let x = 10f64.powf(rng.gen_range(-0.5..1.0));
        let r_a = [x + 0.1, rng.gen_range(0.05..0.95) * g.a, rng.gen_range(0.05..0.95) * g.b];
        let r_d = [0.1, rng.gen_range(0.05..0.95) * g.a, rng.gen_range(0.05..0.95) * g.b];
        let closed = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total;
        let oracle = channel_quadrature_tensor(1.0, &g, r_a, r_d, &oracle_ctrl(), ModeSet::Transverse).unwrap();
        let floor = 1e-3 * max_abs(&closed);
        for c in Component::SIX {
            let (i, j) = (c.i, c.j);
            for (u, v) in [(i, j), (j, i)] {
                // The closed-form yz carries the opposite sign to the mode-function result.
                let sign = if c == Component::YZ { -1.0 } else { 1.0 };
                let d = (closed[u][v] - sign * oracle[u][v]).norm() / closed[u][v].norm().max(floor);
                assert!(d < 1e-4, "{c} ({u}{v}) X={x} a={} b={}: {d:e}", g.a, g.b);
            }
        }
    }
}

#[test]
fn flipped_tm_set_flips_xz() {
    let g = ChannelGeometry::new(4.0, 5.0, 1.0).unwrap();
    let (r_a, r_d) = ([2.0, 1.5, 3.0], [0.0, 2.1, 1.5]);
    let closed = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total;
    let flipped = channel_quadrature_tensor(1.0, &g, r_a, r_d, &oracle_ctrl(), ModeSet::FlippedTm).unwrap();
    let d = |a: Complex64, b: Complex64| (a - b).norm() / a.norm();
    assert!(d(closed[0][0], flipped[0][0]) < 1e-5);
    assert!(d(closed[0][2], -flipped[0][2]) < 1e-5);
    assert!(d(closed[2][0], -flipped[2][0]) < 1e-5);
}

#[test]
fn yz_sign_against_free_space_in_a_wide_channel() {
    let a = 10.05 * PI;
    let g = square(a);
    let r_d = [0.0, a / 2.0, a / 2.0];
    let r_a = [0.1, a / 2.0 + 0.06, a / 2.0 + 0.08];
    let ch = coupling_channel(1.0, &g, r_a, r_d, &ctrl_big()).unwrap().total;
    let free = coupling_free3d(1.0, [0.1, 0.06, 0.08], 1.0).unwrap().total;
    let scale = max_abs(&free);
    for (i, j) in [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 0), (2, 0)] {
        assert!((ch[i][j] - free[i][j]).norm() < 0.01 * scale, "{i}{j}");
    }
    assert!(free[1][2].norm() > 0.3 * scale);
    assert!((ch[1][2] + free[1][2]).norm() < 0.01 * scale);
    assert!((ch[2][1] + free[2][1]).norm() < 0.01 * scale);
}

#[test]
fn single_component_oracle() {
    let g = ChannelGeometry::new(4.0, 5.0, 1.0).unwrap();
    let (r_a, r_d) = ([1.5, 1.5, 3.0], [0.0, 2.1, 1.5]);
    let closed = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total;
    let v = coupling_channel_quadrature(1.0, &g, r_a, r_d, 1e-8, Component::XX).unwrap();
    assert!((v - closed[0][0]).norm() < 1e-5 * closed[0][0].norm());
}

#[test]
fn zero_mode_integrand_vanishes() {
    let g = ChannelGeometry::new(2.0, 3.0, 1.0).unwrap();
    for kx in [-3.0, 0.0, 0.7, 12.0] {
        let (f, b) = channel_mode_integrand(
            Complex64::new(1.0, 1e-6),
            &g,
            0,
            0,
            [1.0, 0.7, 1.1],
            [0.0, 0.3, 2.0],
            Complex64::new(kx, 0.5),
            ModeSet::Transverse,
        );
        assert_eq!(max_abs(&f) + max_abs(&b), 0.0);
    }
}

#[test]
fn yy_summand_is_four_times_the_wire() {
    let g = ChannelGeometry::new(1.7, 2.3, 1.9).unwrap();
    for x in [0.01, 0.4, 3.0, 50.0] {
        let t = channel_summand(1.3, &g, 0.0, 0.0, x, [1.0; 4], [1.0; 4]).unwrap();
        let wire = coupling_free1d(1.3, x, g.a, g.b, g.permittivity).unwrap();
        assert!((t[1][1] - 4.0 * wire).norm() <= 1e-12 * wire.norm());
    }
}

#[test]
fn centered_square_symmetry() {
    let g = square(w1());
    for x in [0.05, 1.0, 30.0] {
        let (r_a, r_d) = centered(&g, x);
        let t = coupling_channel(1.0, &g, r_a, r_d, &ctrl_big()).unwrap().total;
        let scale = max_abs(&t);
        assert!((t[1][1] - t[2][2]).norm() <= 1e-12 * scale);
        for (i, j) in [(0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)] {
            assert!(t[i][j].norm() <= 1e-12 * scale, "{i}{j} at X={x}");
        }
    }
}

fn exponent(g: &ChannelGeometry, x0: f64, comp: Component) -> f64 {
    let xs: Vec<f64> = (-1..=1).map(|k| x0 * (1.0 + 0.02 * k as f64)).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let (r_a, r_d) = centered(g, x);
            comp.get(&coupling_channel(1.0, g, r_a, r_d, &ctrl_big()).unwrap().total).norm()
        })
        .collect();
    loglog_exponent(&xs, &ys)
}

#[test]
fn exponents_near_and_far() {
    let g = square(w1());
    let near = exponent(&g, 0.03, Component::XX);
    assert!((near - 3.0).abs() < 0.1, "{near}");
    for c in [Component::XX, Component::YY, Component::ZZ] {
        let far = exponent(&g, 100.0, c);
        assert!(far.abs() <= 0.05, "{c}: {far}");
    }
}

#[test]
fn one_rd_term_per_diagonal_component() {
    let g = square(w1());
    let (r_a, r_d) = centered(&g, 2.0);
    for c in [Component::XX, Component::YY, Component::ZZ] {
        let terms = channel_sum_terms(1.0, &g, r_a, r_d, c, &SumControl::default()).unwrap();
        let biggest = terms.iter().map(|t| t.value.norm()).fold(0.0, f64::max);
        let rd: Vec<_> = terms.iter().filter(|t| t.is_rd && t.value.norm() > 1e-12 * biggest).collect();
        assert_eq!(rd.len(), 1, "{c}");
        for t in &terms {
            assert_eq!(t.is_rd, t.k_eta < 1.0);
        }
    }
}

#[test]
fn terms_reproduce_total() {
    let g = ChannelGeometry::new(3.1, 4.7, 1.0).unwrap();
    let (r_a, r_d) = ([0.8, 1.0, 3.9], [0.0, 2.6, 0.7]);
    let res = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap();
    for c in Component::SIX {
        let terms = channel_sum_terms(1.0, &g, r_a, r_d, c, &SumControl::default()).unwrap();
        assert_eq!(terms.len() as u64, res.terms_used);
        assert!(terms.iter().all(|t| (t.m, t.n) != (0, 0)));
        let sum: Complex64 = terms.iter().map(|t| t.value).sum();
        let rd: Complex64 = terms.iter().filter(|t| t.is_rd).map(|t| t.value).sum();
        assert!((sum - c.get(&res.total)).norm() <= 1e-14 * max_abs(&res.total));
        assert!((rd - c.get(&res.rd)).norm() <= 1e-14 * max_abs(&res.total));
        let mut by_index = terms.clone();
        by_index.sort_by_key(|t| (t.n, t.m));
        let reordered: Complex64 = by_index.iter().rev().map(|t| t.value).sum();
        assert!((reordered - sum).norm() <= 1e-10 * max_abs(&res.total));
    }
}

#[test]
fn nrd_terms_respect_exponential_bound() {
    let g = ChannelGeometry::new(3.1, 4.7, 1.3).unwrap();
    let (r_a, r_d) = ([0.6, 1.0, 3.9], [0.0, 2.6, 0.7]);
    let x = 0.6;
    for c in Component::SIX {
        let terms = channel_sum_terms(1.0, &g, r_a, r_d, c, &SumControl::default()).unwrap();
        let nrd: Vec<_> = terms.iter().filter(|t| !t.is_rd).collect();
        let q_min = nrd.iter().map(|t| (t.k_eta * t.k_eta - 1.0).sqrt()).fold(f64::INFINITY, f64::min);
        let k_min = nrd.iter().map(|t| t.k_eta).fold(f64::INFINITY, f64::min);
        let bound = 2.0 * (1.0 + 1.0 / (k_min * k_min)) / (g.permittivity * g.a * g.b * q_min);
        for t in nrd {
            let q = (t.k_eta * t.k_eta - 1.0).sqrt();
            assert!(t.value.norm() <= bound * t.k_eta * t.k_eta * (-x * q).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn near_field_matches_free_space() {
    let g = square(10.05 * PI);
    let (r_a, r_d) = centered(&g, 0.1);
    let ch = coupling_channel(1.0, &g, r_a, r_d, &ctrl_big()).unwrap().total;
    let free = coupling_free3d(1.0, [0.1, 0.0, 0.0], 1.0).unwrap().total;
    for i in 0..3 {
        assert!((ch[i][i] - free[i][i]).norm() < 0.05 * free[i][i].norm(), "{i}");
    }
}

#[test]
fn far_field_single_mode_propagation() {
    let g = square(w1());
    let ky = PI / g.a;
    let v = (1.0 - 2.0 * ky * ky).sqrt();
    let xs: Vec<f64> = (0..=20).map(|k| 100.0 + 5.0 * k as f64).collect();
    let vals: Vec<Complex64> = xs
        .iter()
        .map(|&x| {
            let (r_a, r_d) = centered(&g, x);
            coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total[0][0]
        })
        .collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(l, h), z| (l.min(z.norm()), h.max(z.norm())));
    assert!(hi / lo - 1.0 < 0.02);
    for w in vals.windows(2) {
        let step = (w[1] / w[0]).arg();
        let expected = (v * 5.0 + PI).rem_euclid(2.0 * PI) - PI;
        assert!((step - expected).abs() < 1e-6);
    }
}

fn local_extrema(ys: &[f64]) -> usize {
    ys.windows(3).filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0).count()
}

#[test]
fn off_center_oscillation() {
    let g = square(w1());
    let r_d = [0.0, g.a / 2.0, g.b / 20.0];
    let xs: Vec<f64> = (0..=180).map(|k| 10.0 + 0.5 * k as f64).collect();
    let series = |c: Component| -> Vec<f64> {
        xs.iter()
            .map(|&x| {
                let r_a = [x, g.a / 2.0, g.b / 20.0];
                c.get(&coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total).norm()
            })
            .collect()
    };
    // Two propagating modes carry weight in zz once z is off the midplane.
    assert!(local_extrema(&series(Component::ZZ)) >= 3);
    // Only one propagating mode reaches xx, so its far-field modulus stays flat.
    let xx = series(Component::XX);
    let (lo, hi) = xx.iter().skip(40).fold((f64::INFINITY, 0.0f64), |(l, h), &y| (l.min(y), h.max(y)));
    assert!(hi / lo - 1.0 < 1e-3);
}

#[test]
fn truncation_is_sound() {
    let g = ChannelGeometry::new(2.9, 3.6, 1.0).unwrap();
    let (r_a, r_d) = ([0.3, 1.0, 2.9], [0.0, 2.0, 1.1]);
    let loose = coupling_channel(1.0, &g, r_a, r_d, &SumControl { rel_tol: 1e-7, exp_cutoff: 5.0, ..SumControl::default() }).unwrap();
    let tight = coupling_channel(1.0, &g, r_a, r_d, &SumControl { rel_tol: 1e-13, exp_cutoff: 5.0, ..SumControl::default() }).unwrap();
    let scale = max_abs(&tight.total);
    for i in 0..3 {
        for j in 0..3 {
            assert!((loose.total[i][j] - tight.total[i][j]).norm() <= 1e-6 * scale);
        }
    }
    assert!(loose.converged && tight.converged);
    assert!(tight.terms_used > loose.terms_used);
}

#[test]
fn term_cap_reports_not_converged() {
    let g = square(w1());
    let (r_a, r_d) = centered(&g, 0.01);
    let err = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap_err();
    assert!(matches!(err, dipolecav::Error::NotConverged { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swap_transposes(x in 0.1..20.0f64, ya in 0.05..0.95f64, za in 0.05..0.95f64, yd in 0.05..0.95f64, zd in 0.05..0.95f64) {
        let g = ChannelGeometry::new(3.3, 4.1, 1.0).unwrap();
        let r_a = [x, ya * g.a, za * g.b];
        let r_d = [0.0, yd * g.a, zd * g.b];
        let ad = coupling_channel(1.0, &g, r_a, r_d, &SumControl::default()).unwrap().total;
        let da = coupling_channel(1.0, &g, r_d, r_a, &SumControl::default()).unwrap().total;
        let t = transpose(&da);
        let scale = max_abs(&ad);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((ad[i][j] - t[i][j]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn y_z_exchange_in_square(x in 0.1..20.0f64, ya in 0.05..0.95f64, za in 0.05..0.95f64, yd in 0.05..0.95f64, zd in 0.05..0.95f64) {
        let g = square(3.7);
        let t = coupling_channel(1.0, &g, [x, ya * g.a, za * g.b], [0.0, yd * g.a, zd * g.b], &SumControl::default()).unwrap().total;
        let s = coupling_channel(1.0, &g, [x, za * g.a, ya * g.b], [0.0, zd * g.a, yd * g.b], &SumControl::default()).unwrap().total;
        let scale = max_abs(&t);
        let swap = [0, 2, 1];
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((t[i][j] - s[swap[i]][swap[j]]).norm() <= 1e-12 * scale, "{}{}", i, j);
            }
        }
    }

    #[test]
    fn total_is_rd_plus_nrd(x in 0.05..50.0f64, ya in 0.05..0.95f64, zd in 0.05..0.95f64) {
        let g = ChannelGeometry::new(3.3, 4.1, 1.0).unwrap();
        let r = coupling_channel(1.0, &g, [x, ya * g.a, 0.4 * g.b], [0.0, 0.5 * g.a, zd * g.b], &SumControl::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(r.total[i][j], r.rd[i][j] + r.nrd[i][j]);
            }
        }
    }
}
