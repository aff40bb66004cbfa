use thiserror::Error;

/// Errors raised by the evaluators, optimizers and the Monte Carlo oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range. `name` is the field name as
    /// it appears in configuration files.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("system size {n} exceeds the cap of {cap} for {what}")]
    SizeLimit { what: &'static str, n: usize, cap: usize },

    #[error("quadrature did not converge: estimated error {error:e} for value {value:e}")]
    Quadrature { value: f64, error: f64 },

    /// Exponents above roughly 700 overflow `f64`; reported instead of returning infinity.
    #[error("deep-dephasing overflow: exponent {exponent:.3} exceeds {limit}")]
    DephasingOverflow { exponent: f64, limit: f64 },

    #[error("covariance matrix is indefinite: min eigenvalue {min_eigenvalue:e} vs max {max_eigenvalue:e} ({context})")]
    IndefiniteCovariance {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
        context: String,
    },

    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),

    #[error("mean spin <J_z> vanishes; the Ramsey slope is zero")]
    ZeroContrast,

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
