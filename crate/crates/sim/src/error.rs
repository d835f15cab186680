use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("config refers to arc {from}-{to}, which is not an arc of the instance")]
    UnknownArc { from: usize, to: usize },
    #[error("nominal speed must be positive, got {0}")]
    InvalidSpeed(f64),
    #[error("epsilon must be non-negative, got {0}")]
    InvalidEpsilon(f64),
    #[error("instance has no node coordinates")]
    MissingGeometry,
    #[error("route {route} is invalid: {message}")]
    InvalidRoute { route: usize, message: String },
    #[error(transparent)]
    Safety(#[from] lastmile_safety::SafetyError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
