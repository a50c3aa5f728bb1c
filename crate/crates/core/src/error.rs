use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("map is not square ({0} -> {1})")]
    NotSquare(usize, usize),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("invalid exponent p = {0}")]
    InvalidP(f64),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("element list is not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("map input is not supported on diagonal units")]
    NotDiagonalInput,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("solver stopped with status {status:?} after {iterations} iterations")]
    Solver {
        status: crate::sdp::SdpStatus,
        iterations: usize,
    },
    #[error("problem is infeasible")]
    Infeasible,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
