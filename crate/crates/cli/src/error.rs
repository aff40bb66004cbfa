use std::fmt;

use ramsey_core::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 1.
    Validation(String),
    /// Evaluation failed: exit status 2.
    Numerical(String),
    /// A Monte Carlo check exceeded its threshold: exit status 3.
    Statistical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Statistical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Statistical(m) => write!(f, "statistical check failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::SizeLimit { .. } | Error::Unsupported(_) | Error::ZeroContrast => {
                CliError::Validation(e.to_string())
            }
            Error::Quadrature { .. }
            | Error::DephasingOverflow { .. }
            | Error::IndefiniteCovariance { .. }
            | Error::NotNormalized(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("output: {e}"))
    }
}
