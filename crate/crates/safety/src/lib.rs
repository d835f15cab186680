//! Pedestrian intent classification and vocal warnings.
//!
//! Each tracked pedestrian is labelled green (safe), blue (predicted to meet
//! the vehicle's planned path) or red (closer than the proximity threshold),
//! and the vocalizer fires on every entry into blue or red.

pub mod classify;
pub mod error;
pub mod geometry;
pub mod predict;
pub mod scenario;
pub mod scripted;
pub mod track;
pub mod vocalizer;

pub use classify::{classify, sequence, Assessment, Class, ClassifierParams};
pub use error::SafetyError;
pub use geometry::Vec2;
pub use predict::{ConstantVelocity, Prediction, Predictor};
pub use scenario::{run_scenario, Scenario, ScenarioOutcome, Sighting};
pub use scripted::{scripted_interactions, ScriptedInteraction};
pub use track::{Observation, PedestrianTrack, VehiclePath, HISTORY_LEN, PREDICTION_LEN};
pub use vocalizer::{events_csv, vocalizer_events, VocalEvent};
