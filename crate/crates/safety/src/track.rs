//! Pedestrian tracks and the vehicle's planned path.
//!
//! All positions share one fixed ground frame with the vehicle path.

use crate::classify::Class;
use crate::error::SafetyError;
use crate::geometry::{segment_distance, Vec2};

/// Observations fed to a predictor.
pub const HISTORY_LEN: usize = 8;
/// Positions produced by a predictor.
pub const PREDICTION_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub time: f64,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianTrack {
    pub id: u32,
    observations: Vec<Observation>,
    pub prediction: Vec<Observation>,
    pub label_history: Vec<(f64, Class)>,
}

impl PedestrianTrack {
    pub fn new(id: u32) -> Self {
        PedestrianTrack { id, observations: Vec::new(), prediction: Vec::new(), label_history: Vec::new() }
    }

    pub fn observe(&mut self, time: f64, position: Vec2) -> Result<(), SafetyError> {
        if let Some(last) = self.observations.last() {
            if !(time > last.time) {
                return Err(SafetyError::OutOfOrder { id: self.id, time, last: last.time });
            }
        }
        self.observations.push(Observation { time, position });
        Ok(())
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// The last [`HISTORY_LEN`] observations, oldest first.
    pub fn history(&self) -> &[Observation] {
        let start = self.observations.len().saturating_sub(HISTORY_LEN);
        &self.observations[start..]
    }

    pub fn latest(&self) -> Option<&Observation> {
        self.observations.last()
    }

    pub fn current_label(&self) -> Option<Class> {
        self.label_history.last().map(|l| l.1)
    }
}

/// Timestamped polyline; the vehicle holds its end points outside the span.
#[derive(Debug, Clone, PartialEq)]
pub struct VehiclePath {
    waypoints: Vec<Observation>,
}

impl VehiclePath {
    pub fn new(waypoints: Vec<Observation>) -> Result<Self, SafetyError> {
        if waypoints.is_empty() {
            return Err(SafetyError::EmptyPath);
        }
        for w in waypoints.windows(2) {
            if !(w[1].time > w[0].time) {
                return Err(SafetyError::NonMonotonePath { previous: w[0].time, next: w[1].time });
            }
        }
        Ok(VehiclePath { waypoints })
    }

    pub fn from_points(points: &[(f64, f64, f64)]) -> Result<Self, SafetyError> {
        Self::new(points.iter().map(|&(t, x, y)| Observation { time: t, position: Vec2::new(x, y) }).collect())
    }

    /// Constant-velocity straight path.
    pub fn straight(start: Vec2, velocity: Vec2, t0: f64, t1: f64) -> Self {
        VehiclePath {
            waypoints: vec![
                Observation { time: t0, position: start },
                Observation { time: t1, position: start + velocity * (t1 - t0) },
            ],
        }
    }

    pub fn waypoints(&self) -> &[Observation] {
        &self.waypoints
    }

    pub fn position_at(&self, t: f64) -> Vec2 {
        let w = &self.waypoints;
        if t <= w[0].time {
            return w[0].position;
        }
        for pair in w.windows(2) {
            if t <= pair[1].time {
                let f = (t - pair[0].time) / (pair[1].time - pair[0].time);
                return pair[0].position + (pair[1].position - pair[0].position) * f;
            }
        }
        w[w.len() - 1].position
    }

    /// Closest approach of `p` to the path swept during `[t0, t1]`.
    pub fn distance_during(&self, p: Vec2, t0: f64, t1: f64) -> f64 {
        let mut pts = vec![self.position_at(t0)];
        pts.extend(self.waypoints.iter().filter(|w| w.time > t0 && w.time < t1).map(|w| w.position));
        pts.push(self.position_at(t1));
        pts.windows(2).map(|s| segment_distance(p, s[0], s[1])).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_interpolation_and_hold() {
        let path = VehiclePath::from_points(&[(0.0, 0.0, 0.0), (10.0, 10.0, 0.0), (20.0, 10.0, 10.0)]).unwrap();
        assert_eq!(path.position_at(5.0), Vec2::new(5.0, 0.0));
        assert_eq!(path.position_at(15.0), Vec2::new(10.0, 5.0));
        assert_eq!(path.position_at(-1.0), Vec2::new(0.0, 0.0));
        assert_eq!(path.position_at(99.0), Vec2::new(10.0, 10.0));
        assert!((path.distance_during(Vec2::new(12.0, 2.0), 0.0, 20.0) - 2.0).abs() < 1e-12);
        assert!(VehiclePath::from_points(&[(1.0, 0.0, 0.0), (1.0, 1.0, 0.0)]).is_err());
    }

    #[test]
    fn history_keeps_last_eight() {
        let mut t = PedestrianTrack::new(1);
        for i in 0..11 {
            t.observe(i as f64, Vec2::new(i as f64, 0.0)).unwrap();
        }
        assert_eq!(t.history().len(), 8);
        assert_eq!(t.history()[0].time, 3.0);
        assert!(t.observe(10.0, Vec2::default()).is_err());
    }
}
