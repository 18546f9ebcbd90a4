use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error(
        "operator is not Hermitian: max |A - A^dagger| = {max_deviation:e} exceeds {tolerance:e}"
    )]
    NotHermitian { max_deviation: f64, tolerance: f64 },

    #[error("model spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported chemical potential: mu*L = {mu_l} exceeds pi")]
    UnsupportedChemicalPotential { mu_l: f64 },

    #[error("cannot map dimension {0} onto qubits: not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("objective returned a non-finite value {value} at evaluation {evaluation}")]
    NonFinite { value: f64, evaluation: usize },

    #[error("variational energy {energy} lies below the exact ground energy {exact}")]
    VariationalBound { energy: f64, exact: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that indicate a broken numerical contract rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotNormalized(_)
                | Error::NonFinite { .. }
                | Error::VariationalBound { .. }
        )
    }
}
