use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order s = {0} outside (0, 1/2)")]
    InvalidOrder(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("cells overlap: {0}")]
    OverlappingCells(String),
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("mask has {got} entries, problem has {expected} free cells")]
    MaskLength { expected: usize, got: usize },
    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),
    #[error("point is not on the boundary: {0}")]
    NotOnBoundary(String),
    #[error("vector field: {0}")]
    InvalidField(String),
    #[error("negative capacity {value} on arc {arc}")]
    NegativeCapacity { arc: String, value: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
