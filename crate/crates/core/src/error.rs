use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An estimator or calibration could not reach its target. `best` carries the
    /// closest value achieved, when one exists.
    #[error("estimation failed: {message}")]
    Estimation { message: String, best: Option<f64> },

    #[error("order {0} is not resting in the book")]
    NotFound(u64),

    #[error("record {index}: {message}")]
    Parse { index: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>, best: Option<f64>) -> Self {
        Error::Estimation {
            message: msg.into(),
            best,
        }
    }
}
