//! Native JSON files for instances and solutions.
//!
//! Each file is an envelope `{"format": ..., "version": ..., "data": ...}`.
//! Floats are written in shortest round-trip form and parsed exactly, so
//! `load(save(x)) == x`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::model::{Instance, Solution};

pub const INSTANCE_FORMAT: &str = "lastmile-instance";
pub const SOLUTION_FORMAT: &str = "lastmile-solution";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected a {expected} file, found {found:?}")]
    Format { expected: &'static str, found: String },
    #[error("unsupported version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },
    #[error("schema violation: {0}")]
    Schema(#[from] ModelError),
    #[error("schema violation: {0}")]
    Shape(String),
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    data: T,
}

fn to_text<T: Serialize>(format: &str, data: &T) -> String {
    let env = Envelope { format: format.to_string(), version: FORMAT_VERSION, data };
    let mut s = serde_json::to_string_pretty(&env).expect("plain data serializes");
    s.push('\n');
    s
}

fn from_text<T: DeserializeOwned>(format: &'static str, text: &str) -> Result<T, IoError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
        version: u32,
    }
    let header: Header = serde_json::from_str(text)?;
    if header.format != format {
        return Err(IoError::Format { expected: format, found: header.format });
    }
    if header.version != FORMAT_VERSION {
        return Err(IoError::Version { found: header.version, supported: FORMAT_VERSION });
    }
    let env: Envelope<T> = serde_json::from_str(text)?;
    Ok(env.data)
}

pub fn instance_to_string(instance: &Instance) -> String {
    to_text(INSTANCE_FORMAT, instance)
}

pub fn instance_from_str(text: &str) -> Result<Instance, IoError> {
    let inst: Instance = from_text(INSTANCE_FORMAT, text)?;
    inst.validate()?;
    Ok(inst)
}

pub fn solution_to_string(solution: &Solution) -> String {
    to_text(SOLUTION_FORMAT, solution)
}

pub fn solution_from_str(text: &str) -> Result<Solution, IoError> {
    let sol: Solution = from_text(SOLUTION_FORMAT, text)?;
    if sol.latency.len() != sol.idle.len() || sol.latency.is_empty() {
        return Err(IoError::Shape("latency and idle vectors must be non-empty and aligned".into()));
    }
    if let Some(r) = sol.routes.iter().find(|r| r.stops.iter().any(|&c| c == 0 || c >= sol.latency.len())) {
        return Err(IoError::Shape(format!("route of vehicle {} references an unknown customer", r.vehicle)));
    }
    Ok(sol)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, instance_to_string(instance))?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, IoError> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

pub fn save_solution(solution: &Solution, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, solution_to_string(solution))?;
    Ok(())
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<Solution, IoError> {
    solution_from_str(&std::fs::read_to_string(path)?)
}
