use thiserror::Error;

use crate::nucore::Infeasibility;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible parameter point: {0}")]
    Infeasible(Infeasibility),
    #[error("no bound state for n = {n}: {reason}")]
    NoBoundState { n: usize, reason: String },
    #[error("{0}")]
    Unsupported(String),
}

impl From<Infeasibility> for Error {
    fn from(value: Infeasibility) -> Self {
        Error::Infeasible(value)
    }
}
