//! Real-argument special functions used by the closed-form tensors.
//!
//! Bessel functions of the first and second kind are evaluated by Miller's
//! backward recurrence (with Neumann series for `Y`) below `x = 25` and by the
//! Hankel asymptotic expansion above. `K0`/`K1` use the ascending series for
//! `x <= 2` and Steed's continued fraction beyond. `Ci` and `Si` use their
//! power series for `x <= 4` and the continued fraction of `E1(ix)` beyond.
//!
//! Only orders 0 and 2 are exposed publicly.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const ASYMPTOTIC_X: f64 = 25.0;
const MILLER_LEN: usize = 104;
const K_SERIES_X: f64 = 2.0;
const CISI_SERIES_X: f64 = 4.0;

/// A function value together with a rough absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue<T> {
    pub value: T,
    pub abs_err_est: f64,
}

/// Selector for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialFunction {
    BesselJ(u32),
    BesselY(u32),
    Hankel1(u32),
    BesselK(u32),
    CosInt,
    ShiftedSinInt,
}

fn check_order(func: &'static str, order: u32) -> Result<()> {
    if order == 0 || order == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder { func, order })
    }
}

/// `J_order(x)` for `order` in {0, 2} and `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    check_order("bessel_j", order)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_j", x });
    }
    Ok(bessel_j012(x)[order as usize])
}

/// `Y_order(x)` for `order` in {0, 2} and `x > 0`.
pub fn bessel_y(order: u32, x: f64) -> Result<f64> {
    check_order("bessel_y", order)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "bessel_y", x });
    }
    let (_, y) = bessel_jy012(x);
    let v = y[order as usize];
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { func: "bessel_y", x })
    }
}

/// `H_order^(1)(x) = J_order(x) + i Y_order(x)`.
pub fn hankel1(order: u32, x: f64) -> Result<Complex64> {
    check_order("hankel1", order)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { func: "hankel1", x });
    }
    let (j, y) = bessel_jy012(x);
    let k = order as usize;
    if !y[k].is_finite() {
        return Err(Error::Domain { func: "hankel1", x });
    }
    Ok(Complex64::new(j[k], y[k]))
}

/// `K_order(x)` for `order` in {0, 2} and `x > 0`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    check_order("bessel_k", order)?;
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain { func: "bessel_k", x });
    }
    let (k0, k2) = bessel_k02(x);
    let v = if order == 0 { k0 } else { k2 };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { func: "bessel_k", x })
    }
}

/// `H_order^(1)(i w)` for real `w > 0`, through `K`: `H0(iw) = -(2i/pi) K0(w)`
/// and `H2(iw) = (2i/pi) K2(w)`.
pub fn hankel1_imaginary(order: u32, w: f64) -> Result<Complex64> {
    let k = bessel_k(order, w)?;
    let sign = if order == 0 { -1.0 } else { 1.0 };
    Ok(Complex64::new(0.0, sign * FRAC_2_PI * k))
}

/// Cosine integral. For negative arguments the value on the upper side of
/// the branch cut is returned, `Ci(|x|) + i pi`.
pub fn cosint(x: f64) -> Result<Complex64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::Domain { func: "cosint", x });
    }
    if x.is_infinite() {
        let im = if x < 0.0 { PI } else { 0.0 };
        return Ok(Complex64::new(0.0, im));
    }
    let (ci, _) = ci_si(x.abs());
    Ok(Complex64::new(ci, if x < 0.0 { PI } else { 0.0 }))
}

/// Shifted sine integral `si(x) = Si(x) - pi/2`.
pub fn shifted_sinint(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return -FRAC_PI_2;
    }
    if x.is_infinite() {
        return if x > 0.0 { 0.0 } else { -PI };
    }
    let (_, si) = ci_si(x.abs());
    if x > 0.0 {
        si
    } else {
        -si - PI
    }
}

/// Evaluate any of the exposed functions with an error estimate.
pub fn evaluate(func: SpecialFunction, x: f64) -> Result<SpecialValue<Complex64>> {
    let bessel_envelope = |x: f64| (FRAC_2_PI / x).sqrt().min(1.0);
    let (value, scale) = match func {
        SpecialFunction::BesselJ(n) => {
            let v = bessel_j(n, x)?;
            (Complex64::new(v, 0.0), bessel_envelope(x))
        }
        SpecialFunction::BesselY(n) => {
            let v = bessel_y(n, x)?;
            (Complex64::new(v, 0.0), bessel_envelope(x))
        }
        SpecialFunction::Hankel1(n) => (hankel1(n, x)?, bessel_envelope(x)),
        SpecialFunction::BesselK(n) => (Complex64::new(bessel_k(n, x)?, 0.0), 0.0),
        SpecialFunction::CosInt => (cosint(x)?, 1.0 / x.abs()),
        SpecialFunction::ShiftedSinInt => (Complex64::new(shifted_sinint(x), 0.0), 1.0 / x.abs()),
    };
    Ok(SpecialValue {
        value,
        abs_err_est: 16.0 * f64::EPSILON * (value.norm() + scale.min(1e300)),
    })
}

/// `[J0, J1, J2](x)` for `x >= 0`.
pub(crate) fn bessel_j012(x: f64) -> [f64; 3] {
    if x == 0.0 {
        return [1.0, 0.0, 0.0];
    }
    if x >= ASYMPTOTIC_X {
        return [0, 1, 2].map(|n| hankel_asymptotic(n, x).0);
    }
    let mut table = [0.0; MILLER_LEN];
    miller_table(x, &mut table);
    [table[0], table[1], table[2]]
}

/// `([J0, J1, J2], [Y0, Y1, Y2])` for `x > 0`.
pub(crate) fn bessel_jy012(x: f64) -> ([f64; 3], [f64; 3]) {
    if x >= ASYMPTOTIC_X {
        let h = [0, 1, 2].map(|n| hankel_asymptotic(n, x));
        return (h.map(|v| v.0), h.map(|v| v.1));
    }
    let mut t = [0.0; MILLER_LEN];
    let top = miller_table(x, &mut t);
    let log_term = (0.5 * x).ln() + EULER_GAMMA;

    let mut sum0 = 0.0;
    let mut sum1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 <= top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        sum0 += sign * t[2 * k] / kf;
        sum1 += sign * (t[2 * k - 1] - t[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = FRAC_2_PI * (log_term * t[0] - 2.0 * sum0);
    let y1 = FRAC_2_PI * (log_term * t[1] - t[0] / x + sum1);
    let y2 = 2.0 / x * y1 - y0;
    ([t[0], t[1], t[2]], [y0, y1, y2])
}

/// Fills `out[0..=top]` with `J_k(x)` via backward recurrence normalised by
/// `J0 + 2 sum J_2k = 1`. Valid for `0 < x < ASYMPTOTIC_X`.
fn miller_table(x: f64, out: &mut [f64; MILLER_LEN]) -> usize {
    let mut start = (x + 12.0 * x.cbrt() + 30.0) as usize;
    start += start % 2;
    let start = start.min(MILLER_LEN - 2);

    out.iter_mut().for_each(|v| *v = 0.0);
    out[start] = 1.0;
    let mut next = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * out[k] - next;
        next = out[k];
        out[k - 1] = prev;
        if prev.abs() > 1e250 {
            for v in &mut out[k - 1..=start] {
                *v *= 1e-250;
            }
            next *= 1e-250;
        }
    }
    let mut norm = out[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * out[k];
    }
    for v in &mut out[..=start] {
        *v /= norm;
    }
    start
}

/// Hankel asymptotic expansion, returns `(J_n(x), Y_n(x))`.
fn hankel_asymptotic(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..80u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= last || next == 0.0 {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        last = term.abs();
        if last < 1e-18 * p.abs() {
            break;
        }
    }
    // chi = x - pi/4 - n pi/2, expanded so that cos/sin see the exact x.
    let (sx, cx) = x.sin_cos();
    let (cphi, sphi) = match n % 4 {
        0 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        1 => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        2 => (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        _ => (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    };
    let cos_chi = cx * cphi + sx * sphi;
    let sin_chi = sx * cphi - cx * sphi;
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

/// `(K0(x), K2(x))` for `x > 0`.
pub(crate) fn bessel_k02(x: f64) -> (f64, f64) {
    let (k0, k1) = bessel_k01(x);
    (k0, k0 + 2.0 / x * k1)
}

pub(crate) fn bessel_k01(x: f64) -> (f64, f64) {
    if x <= K_SERIES_X {
        let y = 0.25 * x * x;
        let half_log = (0.5 * x).ln();
        let mut t0 = 1.0; // y^k / (k!)^2
        let mut t1 = 1.0; // y^k / (k! (k+1)!)
        let mut harmonic = 0.0;
        let (mut i0, mut i1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..200 {
            let harmonic_next = harmonic + 1.0 / (k + 1) as f64;
            i0 += t0;
            i1 += t1;
            s0 += t0 * harmonic;
            s1 += t1 * (harmonic + harmonic_next - 2.0 * EULER_GAMMA);
            if t0 < 1e-18 * i0 {
                break;
            }
            let kk = (k + 1) as f64;
            t0 *= y / (kk * kk);
            t1 *= y / (kk * (kk + 1.0));
            harmonic = harmonic_next;
        }
        let i1 = 0.5 * x * i1;
        let k0 = -(half_log + EULER_GAMMA) * i0 + s0;
        let k1 = 1.0 / x + half_log * i1 - 0.25 * x * s1;
        (k0, k1)
    } else {
        // Steed's continued fraction (Temme's variant) at order zero.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..10_000 {
            a -= 2.0 * (i - 1) as f64;
            c = -a * c / i as f64;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < 1e-17 {
                break;
            }
        }
        h *= a1;
        let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k1 = k0 * (x + 0.5 - h) / x;
        (k0, k1)
    }
}

/// `(Ci(x), Si(x) - pi/2)` for `x > 0`.
fn ci_si(x: f64) -> (f64, f64) {
    if x <= CISI_SERIES_X {
        let x2 = x * x;
        let mut ci_sum = 0.0;
        let mut u = 1.0;
        let mut si_sum = x;
        let mut v = x;
        for k in 1..60 {
            let kf = k as f64;
            u *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            ci_sum += u / (2.0 * kf);
            v *= -x2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            si_sum += v / (2.0 * kf + 1.0);
            if u.abs() < 1e-18 && v.abs() < 1e-18 {
                break;
            }
        }
        (EULER_GAMMA + x.ln() + ci_sum, si_sum - FRAC_PI_2)
    } else {
        // Lentz evaluation of E1(ix) = -Ci(x) + i si(x).
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 2..10_000 {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += 2.0;
            d = (d * a + b).inv();
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        let (sx, cx) = x.sin_cos();
        let e1 = Complex64::new(cx, -sx) * h;
        (-e1.re, e1.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2, 0.0).unwrap(), 0.0);
        assert_eq!(shifted_sinint(0.0), -FRAC_PI_2);
        assert!(shifted_sinint(1e8).abs() < 1e-7);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_y(0, 0.0).is_err());
        assert!(bessel_y(0, -2.0).is_err());
        assert!(bessel_k(0, 0.0).is_err());
        assert!(hankel1(2, 0.0).is_err());
        assert!(cosint(0.0).is_err());
        assert!(matches!(bessel_j(1, 1.0), Err(Error::UnsupportedOrder { .. })));
    }

    #[test]
    fn known_zeros() {
        assert!(bessel_j(0, 2.404_825_557_695_773).unwrap().abs() < 1e-10);
        assert!(bessel_y(0, 0.893_576_966_279_167_5).unwrap().abs() < 1e-10);
        assert!(cosint(0.616_505_485_6).unwrap().re.abs() < 1e-9);
    }

    #[test]
    fn reference_values() {
        assert!((bessel_k(0, 1.0).unwrap() - 0.421_024_438_2).abs() < 1e-9);
        assert!((cosint(1.0).unwrap().re - 0.337_403_922_9).abs() < 1e-9);
        assert!((shifted_sinint(1.0) + 0.624_713_256_4).abs() < 1e-9);
        // Both sides of the crossover agree.
        for x in [1.999_999_999, 2.000_000_001, 3.999_999, 4.000_001, 24.999_999, 25.000_001] {
            let (k0a, _) = bessel_k02(x);
            assert!(k0a.is_finite());
        }
    }

    #[test]
    fn k_decay_and_small_argument() {
        let x = 40.0;
        let k0 = bessel_k(0, x).unwrap();
        assert!(k0 < 1e-17);
        assert!(k0 <= (-x).exp() * (PI / (2.0 * x)).sqrt());
        let x = 1e-6;
        let k2 = bessel_k(2, x).unwrap();
        assert!((k2 * x * x / 2.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn k_is_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let x = 1e-3 * 1.03f64.powi(i);
            let k0 = bessel_k(0, x).unwrap();
            let k2 = bessel_k(2, x).unwrap();
            assert!(k0 < prev, "K0 not decreasing at {x}");
            assert!(k2 > k0);
            prev = k0;
        }
    }

    #[test]
    fn hankel_large_argument_envelope() {
        let h = hankel1(0, 100.0).unwrap();
        let env = (2.0 / (PI * 100.0)).sqrt();
        assert!((h.norm() / env - 1.0).abs() < 0.01);
        let h2 = hankel1(2, 1.0).unwrap();
        assert!(h2.im < 0.0 && h2.is_finite());
    }

    #[test]
    fn reflection_identities() {
        for &x in &[0.1, 1.0, 3.7, 4.2, 50.0] {
            assert!((shifted_sinint(x) + shifted_sinint(-x) + PI).abs() <= 4.0 * f64::EPSILON * PI);
            let d = cosint(-x).unwrap() - cosint(x).unwrap();
            assert_eq!(d, Complex64::new(0.0, PI));
        }
    }

    #[test]
    fn evaluate_reports_error_estimate() {
        let v = evaluate(SpecialFunction::Hankel1(0), 3.0).unwrap();
        assert!(v.abs_err_est > 0.0 && v.abs_err_est < 1e-13);
        assert_eq!(v.value, hankel1(0, 3.0).unwrap());
    }
}
