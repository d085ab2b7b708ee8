use thiserror::Error;

use crate::optimizer::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("prior of sender `{sender}` is not full-support (type `{type_label}` has mass {mass})")]
    NotFullSupport {
        sender: String,
        type_label: String,
        mass: f64,
    },
    #[error("{what} is not normalized (sum = {sum})")]
    NotNormalized { what: String, sum: f64 },
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("internal LP reported {status} where an optimum must exist")]
    LpStatus { status: String },
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Lp(_) | Error::LpStatus { .. })
    }
}
