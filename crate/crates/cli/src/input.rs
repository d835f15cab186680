//! Instance files in either the native JSON envelope or a benchmark text layout.

use std::fs;
use std::path::Path;

use thiserror::Error;

use lastmile_core::instances::{instance_from_str, parse_benchmark, IoError, ParseError, SolomonOptions};
use lastmile_core::{Instance, ModelError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid instance file {path}")]
    Native { path: String, source: IoError },
    #[error("invalid benchmark file {path}")]
    Benchmark { path: String, source: ParseError },
    #[error("cannot apply overrides to {path}")]
    Override { path: String, source: ModelError },
}

/// Fleet and ε overrides applied after loading.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub vehicles: Option<usize>,
    pub capacity: Option<u32>,
    pub epsilon: Option<f64>,
}

pub fn load_any(path: &Path, overrides: &Overrides) -> Result<Instance, InputError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| InputError::Read { path: name.clone(), source })?;
    if text.trim_start().starts_with('{') {
        let mut inst = instance_from_str(&text).map_err(|source| InputError::Native { path: name.clone(), source })?;
        let over = |source| InputError::Override { path: name.clone(), source };
        if overrides.vehicles.is_some() || overrides.capacity.is_some() {
            let k = overrides.vehicles.unwrap_or(inst.num_vehicles());
            let fleet = match overrides.capacity {
                Some(c) => vec![c; k],
                None => (0..k).map(|v| inst.capacity(v.min(inst.num_vehicles() - 1))).collect(),
            };
            inst = inst.with_fleet(fleet).map_err(over)?;
        }
        if let Some(eps) = overrides.epsilon {
            inst = inst.with_epsilon(eps).map_err(over)?;
        }
        Ok(inst)
    } else {
        let options = SolomonOptions {
            vehicles: overrides.vehicles,
            capacity: overrides.capacity,
            epsilon: overrides.epsilon.unwrap_or(0.0),
        };
        let mut inst =
            parse_benchmark(&text, &options).map_err(|source| InputError::Benchmark { path: name, source })?;
        if inst.name().is_empty() {
            if let Some(stem) = path.file_stem() {
                inst.set_name(stem.to_string_lossy());
            }
        }
        Ok(inst)
    }
}
