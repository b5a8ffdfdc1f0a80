use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid number literal `{0}`")]
    BadNumber(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interval [{lo}, {hi}] is not contained in the domain [{x0}, {x1}]")]
    OutsideDomain { lo: f64, hi: f64, x0: f64, x1: f64 },

    #[error("domains differ: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),

    #[error("slope bound {0} outside [0, 1]")]
    SlopeBound(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no window satisfies the growth surrogate: {0}")]
    EmptyFamily(String),

    #[error("unknown generator family `{0}`")]
    UnknownFamily(String),

    #[error("sequence too short: {0}")]
    TooShort(String),

    #[error("singular linear system ({0})")]
    Singular(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("truncation bound not met: {0}")]
    Truncation(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
