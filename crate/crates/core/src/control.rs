use serde::{Deserialize, Serialize};

/// Truncation and convergence policy shared by the mode sums and the
/// quadrature oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumControl {
    /// Relative size (against the tensor norm) below which trailing terms
    /// count as negligible.
    pub rel_tol: f64,
    /// Evanescent terms are summed at least until `q * X` exceeds this value,
    /// where `q = sqrt(k^2 - p^2)`.
    pub exp_cutoff: f64,
    /// Hard cap on the number of evaluated terms.
    pub max_terms: u64,
    /// Relative detuning `|p^2 - k^2| / p^2` below which a mode is resonant.
    pub tol_res: f64,
    /// Imaginary shift of `p` used by the quadrature oracles, in units of `p`.
    pub eps_imag: f64,
}

impl Default for SumControl {
    fn default() -> Self {
        SumControl {
            rel_tol: 1e-10,
            exp_cutoff: 40.0,
            max_terms: 1_000_000,
            tol_res: 1e-9,
            eps_imag: 1e-6,
        }
    }
}

impl SumControl {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.exp_cutoff > 0.0
            && self.exp_cutoff.is_finite()
            && self.max_terms > 0
            && self.tol_res >= 0.0
            && self.eps_imag > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidInput(format!("invalid sum control {self:?}")))
        }
    }
}
