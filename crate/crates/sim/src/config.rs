//! Simulation settings and their flat `key = value` file form.
//!
//! ```text
//! speed = 1.2
//! epsilon = 5
//! seed = 7
//! timing = nominal            # or geometry
//! vmm = on
//! kappa = 1.0
//! stop_on_red = off
//! roughness.0-1 = 36:0.10, 14:0
//! pedestrians.1-2 = crossing.txt
//! ```
//!
//! Roughness values are `length_m:mean_distance_m` segments in driving order.
//! Pedestrian scenario paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::Path;

use lastmile_perception::Segment;
use lastmile_safety::{ClassifierParams, Scenario};

use crate::error::SimError;

/// How the unmodulated traversal time of an arc is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArcTiming {
    /// The instance's nominal duration `d̄(i, j)`.
    #[default]
    Nominal,
    /// Straight-line distance between node coordinates over the cruise speed.
    Geometry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub nominal_speed: f64,
    /// Half-width of the uniform per-arc perturbation.
    pub epsilon: f64,
    pub seed: u64,
    pub timing: ArcTiming,
    pub vmm_enabled: bool,
    /// Vibration coefficient in `κ · v² · roughness`.
    pub kappa: f64,
    pub stop_on_red: bool,
    pub roughness: BTreeMap<(usize, usize), Vec<Segment>>,
    /// Encounters replayed in arc-local time (zero at departure).
    pub pedestrians: BTreeMap<(usize, usize), Scenario>,
    pub classifier: ClassifierParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nominal_speed: 1.2,
            epsilon: 0.0,
            seed: 0,
            timing: ArcTiming::Nominal,
            vmm_enabled: true,
            kappa: 1.0,
            stop_on_red: false,
            roughness: BTreeMap::new(),
            pedestrians: BTreeMap::new(),
            classifier: ClassifierParams::default(),
        }
    }
}

fn parse_arc(key: &str, line: usize) -> Result<(usize, usize), SimError> {
    let bad = || SimError::Config { line, message: format!("arc key {key:?} must look like `3-5`") };
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_bool(v: &str, line: usize) -> Result<bool, SimError> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(SimError::Config { line, message: format!("expected on/off, got {v:?}") }),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize) -> Result<T, SimError> {
    v.parse().map_err(|_| SimError::Config { line, message: format!("bad number {v:?}") })
}

/// `36:0.10, 14:0` into segments.
pub fn parse_segments(v: &str, line: usize) -> Result<Vec<Segment>, SimError> {
    v.split(',')
        .map(|part| {
            let (len, r) = part.trim().split_once(':').ok_or_else(|| SimError::Config {
                line,
                message: format!("segment {part:?} must be `length:roughness`"),
            })?;
            let len: f64 = parse_num(len.trim(), line)?;
            let r: f64 = parse_num(r.trim(), line)?;
            if !(len > 0.0 && len.is_finite() && r >= 0.0 && r.is_finite()) {
                return Err(SimError::Config { line, message: format!("segment {part:?} out of range") });
            }
            Ok(Segment::new(len, r))
        })
        .collect()
}

impl SimConfig {
    /// Parses a config file body; scenario paths are read relative to `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<SimConfig, SimError> {
        let mut cfg = SimConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| {
                SimError::Config { line: line_no, message: format!("expected key = value, got {line:?}") }
            })?;
            match key {
                "speed" => cfg.nominal_speed = parse_num(value, line_no)?,
                "epsilon" => cfg.epsilon = parse_num(value, line_no)?,
                "seed" => cfg.seed = parse_num(value, line_no)?,
                "kappa" => cfg.kappa = parse_num(value, line_no)?,
                "vmm" => cfg.vmm_enabled = parse_bool(value, line_no)?,
                "stop_on_red" => cfg.stop_on_red = parse_bool(value, line_no)?,
                "proximity" => cfg.classifier.proximity = parse_num(value, line_no)?,
                "timing" => {
                    cfg.timing = match value {
                        "nominal" => ArcTiming::Nominal,
                        "geometry" => ArcTiming::Geometry,
                        _ => {
                            return Err(SimError::Config {
                                line: line_no,
                                message: format!("unknown timing {value:?}"),
                            })
                        }
                    }
                }
                _ => {
                    if let Some(arc) = key.strip_prefix("roughness.") {
                        cfg.roughness.insert(parse_arc(arc, line_no)?, parse_segments(value, line_no)?);
                    } else if let Some(arc) = key.strip_prefix("pedestrians.") {
                        let path = base_dir.join(value);
                        let text = std::fs::read_to_string(&path).map_err(|e| SimError::Config {
                            line: line_no,
                            message: format!("{}: {e}", path.display()),
                        })?;
                        let scenario = Scenario::parse(&text).map_err(|e| SimError::Config {
                            line: line_no,
                            message: format!("{}: {e}", path.display()),
                        })?;
                        cfg.pedestrians.insert(parse_arc(arc, line_no)?, scenario);
                    } else {
                        return Err(SimError::Config { line: line_no, message: format!("unknown key {key:?}") });
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SimConfig, SimError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}
