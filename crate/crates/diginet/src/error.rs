use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("quadrature did not converge (best estimate {estimate}, error estimate {error})")]
    NoConvergence { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
