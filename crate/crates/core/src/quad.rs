//! Adaptive Gauss-Kronrod quadrature, sequence extrapolation, and an
//! oscillatory tail integrator. This is the numerical backbone of the
//! quadrature oracles and is kept independent of the closed forms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Values that can be integrated: a vector space over `f64` with a norm.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

/// Fixed-size complex vector, for integrating several components at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([Complex64::new(0.0, 0.0); N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V> {
    pub value: V,
    pub abs_err: f64,
    pub evals: usize,
}

// 21-point Kronrod abscissae; the odd entries are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel with the embedded 10-point Gauss estimate.
fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    for k in 0..10 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * WGK[k];
        if k % 2 == 1 {
            gauss = gauss + pair * WG[k / 2];
        }
    }
    let value = kronrod * half;
    let err = (kronrod - gauss).norm() * half.abs();
    (value, err)
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`. `breakpoints` inside
/// the interval seed the initial partition (near-singular points go there).
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    if a == b {
        return Ok(QuadResult { value: V::zero(), abs_err: 0.0, evals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in edges.windows(2) {
        let (value, err) = gk21(&mut f, w[0], w[1]);
        evals += 21;
        heap.push(Panel { a: w[0], b: w[1], value, err });
    }

    loop {
        let (total, err) = heap.iter().fold((V::zero(), 0.0), |(s, e), p| (s + p.value, e + p.err));
        let tolerance = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= tolerance {
            return Ok(QuadResult { value: total * sign, abs_err: err, evals });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { abs_err: err, tolerance });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Quadrature { abs_err: err, tolerance });
        }
        for (l, r) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk21(&mut f, l, r);
            evals += 21;
            heap.push(Panel { a: l, b: r, value, err });
        }
    }
}

/// Integral over `[a, inf)` through the map `x = a + t / (1 - t)`.
pub fn integrate_semi_infinite<V, F>(mut f: F, a: f64, opts: &QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate(
        |t: f64| {
            let s = 1.0 - t;
            let x = a + t / s;
            let v = f(x);
            if v.norm() == 0.0 {
                V::zero()
            } else {
                v * (1.0 / (s * s))
            }
        },
        0.0,
        1.0,
        &[],
        opts,
    )
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns the
/// most extrapolated even-column entry.
pub fn wynn_epsilon(seq: &[Complex64]) -> Complex64 {
    let n = seq.len();
    match n {
        0 => return Complex64::new(0.0, 0.0),
        1 | 2 => return seq[n - 1],
        _ => {}
    }
    let mut older: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut current: Vec<Complex64> = seq.to_vec();
    let mut best = seq[n - 1];
    for k in 1..n {
        let len = current.len() - 1;
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let diff = current[i + 1] - current[i];
            if diff.norm() <= 1e-300 || !diff.is_finite() {
                return best;
            }
            next.push(older[i + 1] + diff.inv());
        }
        older = current;
        current = next;
        if k % 2 == 0 {
            match current.last() {
                Some(v) if v.is_finite() => best = *v,
                _ => return best,
            }
        }
    }
    best
}

/// Integral of an oscillating, decaying integrand over `[start, inf)`, done
/// panel by panel (one panel per `half_period`) with the partial sums of each
/// component accelerated by [`wynn_epsilon`].
pub fn integrate_oscillatory_tail<const N: usize, F>(
    mut f: F,
    start: f64,
    half_period: f64,
    opts: &QuadOptions,
) -> Result<QuadResult<CVec<N>>>
where
    F: FnMut(f64) -> CVec<N>,
{
    const MAX_PANELS: usize = 400;
    const WINDOW: usize = 24;
    let panel_opts = QuadOptions { rel_tol: opts.rel_tol * 1e-2, abs_tol: opts.abs_tol * 1e-2, ..*opts };
    let mut partial: Vec<CVec<N>> = Vec::with_capacity(64);
    let mut sum = CVec::<N>::zero();
    let mut quad_err = 0.0;
    let mut evals = 0;
    let mut previous: Option<CVec<N>> = None;
    let mut stable = 0;
    for k in 0..MAX_PANELS {
        let a = start + k as f64 * half_period;
        let r = integrate(&mut f, a, a + half_period, &[], &panel_opts)?;
        sum = sum + r.value;
        quad_err += r.abs_err;
        evals += r.evals;
        partial.push(sum);
        // A short window keeps round-off in the epsilon table in check.
        let window = &partial[partial.len().saturating_sub(WINDOW)..];
        let mut estimate = CVec::<N>::zero();
        for c in 0..N {
            let seq: Vec<Complex64> = window.iter().map(|v| v.0[c]).collect();
            estimate.0[c] = wynn_epsilon(&seq);
        }
        if let Some(prev) = previous {
            let change = (estimate - prev).norm();
            let tol = opts.abs_tol.max(opts.rel_tol * estimate.norm());
            if change <= tol {
                stable += 1;
                if stable >= 2 {
                    return Ok(QuadResult { value: estimate, abs_err: change + quad_err, evals });
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(estimate);
    }
    let last = previous.unwrap_or(sum);
    Err(Error::Quadrature { abs_err: (last - sum).norm(), tolerance: opts.rel_tol * last.norm() })
}
