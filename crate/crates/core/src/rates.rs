//! Relative transfer-rate kernels built from coupling tensors.
//!
//! Kernels are squared transition amplitudes. The energy-conserving delta and
//! the `2 pi / hbar` prefactor are not applied, so only ratios are meaningful.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tensor::Tensor3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleSpecies {
    pub position: [f64; 3],
    /// Transition dipole.
    pub moment: [Complex64; 3],
}

impl DipoleSpecies {
    pub fn new(position: [f64; 3], moment: [Complex64; 3]) -> Self {
        DipoleSpecies { position, moment }
    }

    /// Real moment along a direction.
    pub fn along(position: [f64; 3], moment: [f64; 3]) -> Self {
        DipoleSpecies { position, moment: moment.map(|m| Complex64::new(m, 0.0)) }
    }

    fn check(&self, who: &str) -> Result<()> {
        if self.moment.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidInput(format!("{who} moment is not finite")));
        }
        if self.moment.iter().all(|m| m.norm() == 0.0) {
            return Err(Error::InvalidInput(format!("{who} moment is zero")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Process {
    /// Resonance energy transfer.
    Ret,
    /// Energy transfer upconversion.
    Etu,
    /// Energy pooling.
    Ep,
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Process::Ret => "RET",
            Process::Etu => "ETU",
            Process::Ep => "EP",
        })
    }
}

impl FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RET" => Ok(Process::Ret),
            "ETU" => Ok(Process::Etu),
            "EP" => Ok(Process::Ep),
            _ => Err(Error::InvalidInput(format!("unknown process '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateKernel {
    /// For pooling, the product `M1 M2`.
    pub amplitude: Complex64,
    /// `|amplitude|^2`.
    pub ret_kernel: f64,
    pub process: Process,
}

impl RateKernel {
    fn from_amplitude(amplitude: Complex64, process: Process) -> Self {
        RateKernel { amplitude, ret_kernel: amplitude.norm_sqr(), process }
    }
}

/// `M = sum_ij mu_A_i V_ij mu_D_j`.
pub fn amplitude(mu_a: &[Complex64; 3], v: &Tensor3, mu_d: &[Complex64; 3]) -> Complex64 {
    let mut m = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            m += mu_a[i] * v[i][j] * mu_d[j];
        }
    }
    m
}

/// Two-body kernel `|M|^2` for RET or ETU.
pub fn pair_rate_kernel(process: Process, donor: &DipoleSpecies, acceptor: &DipoleSpecies, v: &Tensor3) -> Result<RateKernel> {
    if process == Process::Ep {
        return Err(Error::InvalidInput("energy pooling needs two donors; use pooling_rate_kernel".into()));
    }
    donor.check("donor")?;
    acceptor.check("acceptor")?;
    Ok(RateKernel::from_amplitude(amplitude(&acceptor.moment, v, &donor.moment), process))
}

/// Pooling kernel `|M1|^2 |M2|^2`, donor `k` coupled to the acceptor through `v_k`.
pub fn pooling_rate_kernel(
    donor1: &DipoleSpecies,
    donor2: &DipoleSpecies,
    acceptor: &DipoleSpecies,
    v1: &Tensor3,
    v2: &Tensor3,
) -> Result<RateKernel> {
    donor1.check("donor1")?;
    donor2.check("donor2")?;
    acceptor.check("acceptor")?;
    let m1 = amplitude(&acceptor.moment, v1, &donor1.moment);
    let m2 = amplitude(&acceptor.moment, v2, &donor2.moment);
    Ok(RateKernel::from_amplitude(m1 * m2, Process::Ep))
}
