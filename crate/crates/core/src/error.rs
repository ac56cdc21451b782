use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented range or a required key is missing.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The requested detection target cannot be met with a positive threshold.
    #[error("infeasible detector configuration: threshold {threshold} is not positive")]
    NonPositiveThreshold { threshold: f64 },

    /// No SIC factor reaches the requested false-alarm rate (negative discriminant).
    #[error("infeasible SIC inversion: discriminant {discriminant} < 0")]
    NegativeDiscriminant { discriminant: f64 },

    #[error("SIC inversion yields eta^2 = {eta_squared}, outside the admissible range: {reason}")]
    SicOutOfRange {
        eta_squared: f64,
        reason: &'static str,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed configuration document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain { .. } | Error::Json(_) => 2,
            Error::NonPositiveThreshold { .. }
            | Error::NegativeDiscriminant { .. }
            | Error::SicOutOfRange { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 4,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        self.exit_code() == 3
    }
}
