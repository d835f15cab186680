use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SafetyError {
    #[error("vehicle path timestamps must increase: {previous} then {next}")]
    NonMonotonePath { previous: f64, next: f64 },
    #[error("vehicle path is empty")]
    EmptyPath,
    #[error("track {id}: observation at {time} is not after {last}")]
    OutOfOrder { id: u32, time: f64, last: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
