//! Trajectory predictors: 8 observations in, 12 positions out.

use crate::track::{Observation, HISTORY_LEN, PREDICTION_LEN};

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub points: Vec<Observation>,
    /// Fewer than [`HISTORY_LEN`] observations were available.
    pub low_confidence: bool,
}

pub trait Predictor: Send + Sync {
    /// `history` is oldest first; `None` when no prediction can be made.
    fn predict(&self, history: &[Observation]) -> Option<Prediction>;
}

/// Straight-line extrapolation of the mean velocity over the history window,
/// sampled at the window's mean observation period.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantVelocity;

impl Predictor for ConstantVelocity {
    fn predict(&self, history: &[Observation]) -> Option<Prediction> {
        let window = &history[history.len().saturating_sub(HISTORY_LEN)..];
        if window.len() < 2 {
            return None;
        }
        let first = window[0];
        let last = window[window.len() - 1];
        let span = last.time - first.time;
        if !(span > 0.0) {
            return None;
        }
        let velocity = (last.position - first.position) * (1.0 / span);
        let period = span / (window.len() - 1) as f64;
        let points = (1..=PREDICTION_LEN)
            .map(|k| {
                let dt = k as f64 * period;
                Observation { time: last.time + dt, position: last.position + velocity * dt }
            })
            .collect();
        Some(Prediction { points, low_confidence: window.len() < HISTORY_LEN })
    }
}
