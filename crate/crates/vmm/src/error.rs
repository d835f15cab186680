use thiserror::Error;

#[derive(Debug, Error)]
pub enum VmmError {
    #[error("plane fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points are collinear; no unique plane")]
    Degenerate,
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("density must be non-negative, got {0}")]
    NegativeDensity(f64),
    #[error("segment {index}: length and roughness must be finite and non-negative")]
    InvalidSegment { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
