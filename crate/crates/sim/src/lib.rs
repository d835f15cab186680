//! Replays solved routes under travel-time noise, surface roughness and
//! pedestrian encounters, recording realized latencies, idle time, window
//! violations, a vibration proxy and vocal warnings.

pub mod config;
pub mod engine;
pub mod error;
pub mod report;

pub use config::{parse_segments, ArcTiming, SimConfig};
pub use engine::{estimate_nominals, simulate, simulate_batch};
pub use error::SimError;
pub use report::{ArcRecord, SimReport, SimVocalEvent, VibrationSample, VibrationSummary};
