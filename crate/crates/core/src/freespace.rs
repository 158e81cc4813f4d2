//! Free-space couplings: the full 3D tensor with both time orderings, and the
//! reduced 2D and 1D scalar forms used as baselines for the cavities.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::{self, shifted_sinint};
use crate::tensor::{self, Tensor3, ZERO};
use crate::{Error, Result};

/// Supported window for `p r`.
pub const MIN_PR: f64 = 1e-6;
pub const MAX_PR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeCoupling {
    /// Ordering in which the donor emits the virtual photon.
    pub v_plus: Tensor3,
    /// Reverse ordering, the acceptor excited first.
    pub v_minus: Tensor3,
    pub total: Tensor3,
}

/// `(Lambda, Xi)` for one time ordering; `sign = +1` is `V+`.
///
/// `Ci` of a negative argument is taken just below the cut, `Ci(|x|) - i pi`,
/// which makes the sum of the two orderings the outgoing-wave tensor.
fn lambda_xi(x: f64, sign: f64) -> (Complex64, Complex64) {
    let arg = -sign * x;
    let si = shifted_sinint(arg);
    let ci_abs = specfun::cosint(arg.abs()).map_or(f64::NAN, |c| c.re);
    let ci = if arg < 0.0 { Complex64::new(ci_abs, -PI) } else { Complex64::new(ci_abs, 0.0) };
    let (s, c) = x.sin_cos();
    let lambda = -sign * x + x * x * (c * si + sign * s * ci);
    let xi = -c * si - sign * s * ci - x * (s * si - sign * c * ci);
    (lambda, xi)
}

/// 3D coupling tensor between dipoles separated by `r_vec = r_A - r_D`.
pub fn coupling_free3d(p: f64, r_vec: [f64; 3], permittivity: f64) -> Result<FreeCoupling> {
    check_positive("p", p)?;
    check_positive("permittivity", permittivity)?;
    let r = r_vec.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroSeparation { separation: r, minimum: MIN_PR / p });
    }
    let x = p * r;
    if !(MIN_PR..=MAX_PR).contains(&x) {
        return Err(Error::OutOfRange { value: x, min: MIN_PR, max: MAX_PR });
    }
    let rhat = r_vec.map(|c| c / r);
    let pref = 1.0 / (4.0 * PI * PI * permittivity * r * r * r);
    let build = |sign: f64| {
        let (lambda, xi) = lambda_xi(x, sign);
        let mut t = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                let rr = rhat[i] * rhat[j];
                t[i][j] = ((d - rr) * lambda + (d - 3.0 * rr) * xi) * pref;
            }
        }
        t
    };
    let v_plus = build(1.0);
    let v_minus = build(-1.0);
    Ok(FreeCoupling { v_plus, v_minus, total: tensor::add(&v_plus, &v_minus) })
}

/// Scalar coupling of two dipoles confined to a 2D layer of thickness `l_norm`.
pub fn coupling_free2d(p: f64, x: f64, l_norm: f64, permittivity: f64) -> Result<Complex64> {
    check_positive("p", p)?;
    check_positive("L", l_norm)?;
    check_positive("permittivity", permittivity)?;
    if !(x > 0.0) {
        return Err(Error::ZeroSeparation { separation: x, minimum: 0.0 });
    }
    let h0 = specfun::hankel1(0, p * x)?;
    Ok(Complex64::new(0.0, -1.0) / (4.0 * permittivity * l_norm) * p * p * h0)
}

/// Scalar coupling along a 1D wire of cross-section `a x b`.
pub fn coupling_free1d(p: f64, x: f64, a: f64, b: f64, permittivity: f64) -> Result<Complex64> {
    check_positive("p", p)?;
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("permittivity", permittivity)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::ZeroSeparation { separation: x, minimum: 0.0 });
    }
    let phase = Complex64::from_polar(1.0, p * x);
    Ok(Complex64::new(0.0, -1.0) / (2.0 * a * b * permittivity) * p * phase)
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
    }
}
