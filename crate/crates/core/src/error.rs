use thiserror::Error;

/// Errors raised while constructing or evaluating routing data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("unknown vehicle index {0}")]
    UnknownVehicle(usize),
    #[error("duration matrix must be {expected}x{expected}, got {rows} rows")]
    DimensionMismatch { expected: usize, rows: usize },
    #[error("duration ({from},{to}) = {value} is not a finite non-negative number")]
    InvalidDuration { from: usize, to: usize, value: f64 },
    #[error("time window of customer {customer} is invalid: [{start}, {end}]")]
    InvalidWindow { customer: usize, start: f64, end: f64 },
    #[error("service time of node {node} is invalid: {value}")]
    InvalidService { node: usize, value: f64 },
    #[error("epsilon must be finite and non-negative, got {0}")]
    InvalidEpsilon(f64),
    #[error("vehicle {0} has zero capacity")]
    ZeroCapacity(usize),
    #[error("coordinates given for {got} nodes, expected {expected}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("realized duration ({from},{to}) = {value} lies outside the uncertainty box")]
    OutsideUncertaintySet { from: usize, to: usize, value: f64 },
}
