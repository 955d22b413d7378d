use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("sequence is not Dirichlet-invertible: u(1) = 0")]
    NotInvertible,

    #[error("no value supplied for prime power {p}^{k}")]
    MissingPrimePower { p: u64, k: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular system: g(1) = 0")]
    Singular,

    #[error("pole at {0}")]
    Pole(String),

    #[error("evaluation point {point} is within {distance:e} of the pole at {pole}")]
    PoleProximity {
        point: String,
        pole: String,
        distance: f64,
    },

    #[error("precision: {0}")]
    Precision(String),

    #[error("contour passes too close to a zero near {0}")]
    ContourTooClose(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    Truncation { bound: f64, tol: f64 },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
