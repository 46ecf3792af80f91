use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// Parameters are valid for simulation but outside the domain of the
    /// closed-form asymptotics.
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("infeasible power allocation: alpha_{user} - gamma_{user} * sum(alpha_i, i > {user}) = {margin} <= 0")]
    InfeasibleAllocation { user: usize, margin: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::UnsupportedParameters(_) => "unsupported-parameters",
            Error::InfeasibleAllocation { .. } => "infeasible-allocation",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Config(_) => "config-error",
            Error::Io(_) => "io-error",
            Error::Csv(_) => "io-error",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::LengthMismatch { .. } => 2,
            Error::InfeasibleAllocation { .. } => 3,
            Error::UnsupportedParameters(_) => 4,
            Error::InsufficientData(_) => 5,
            Error::Io(_) | Error::Csv(_) => 6,
        }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}
