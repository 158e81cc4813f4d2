use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("{func}: argument {x} outside domain")]
    Domain { func: &'static str, x: f64 },

    #[error("{func}: unsupported order {order} (only 0 and 2 are provided)")]
    UnsupportedOrder { func: &'static str, order: u32 },

    #[error("donor and acceptor separation {separation} is below the minimum {minimum}")]
    ZeroSeparation { separation: f64, minimum: f64 },

    #[error("argument p*r = {value} outside the supported range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    /// A radiation-dominant denominator `p^2 - k^2` is too close to zero.
    #[error("resonant mode {mode:?}: |p^2 - k^2| / p^2 = {detuning:e}")]
    Resonant { mode: (u64, u64), detuning: f64 },

    #[error("mode sum not converged after {terms} terms (tail estimate {tail_bound:e})")]
    NotConverged { terms: u64, tail_bound: f64 },

    #[error("quadrature failed: estimated error {abs_err:e} exceeds tolerance {tolerance:e}")]
    Quadrature { abs_err: f64, tolerance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag used in per-point status columns.
    pub fn status_tag(&self) -> &'static str {
        match self {
            Error::Domain { .. } | Error::UnsupportedOrder { .. } => "domain",
            Error::ZeroSeparation { .. } => "zero_separation",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Resonant { .. } => "resonant",
            Error::NotConverged { .. } => "not_converged",
            Error::Quadrature { .. } => "quadrature",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}
