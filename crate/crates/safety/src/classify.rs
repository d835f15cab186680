//! Green / blue / red labelling.
//!
//! Red: the pedestrian is closer than `proximity` to the vehicle now. Blue: a
//! predicted position comes within `collision_radius` of the vehicle's planned
//! position at the same timestamp; for a standing pedestrian (speed below
//! `standing_speed`) the test is spatial instead, against the corridor swept
//! by the vehicle over the prediction horizon. Green otherwise.

use std::fmt;

use crate::predict::{Prediction, Predictor};
use crate::track::{PedestrianTrack, VehiclePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Green,
    Blue,
    Red,
}

impl Class {
    pub fn letter(&self) -> char {
        match self {
            Class::Green => 'G',
            Class::Blue => 'B',
            Class::Red => 'R',
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Class::Green => "green",
            Class::Blue => "blue",
            Class::Red => "red",
        }
    }

    /// Blue and red trigger the vocalizer.
    pub fn is_reactive(&self) -> bool {
        !matches!(self, Class::Green)
    }

    pub fn from_letter(c: char) -> Option<Class> {
        match c.to_ascii_uppercase() {
            'G' => Some(Class::Green),
            'B' => Some(Class::Blue),
            'R' => Some(Class::Red),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `G-B-R` style rendering of a label sequence.
pub fn sequence(labels: &[Class]) -> String {
    labels.iter().map(|c| c.letter().to_string()).collect::<Vec<_>>().join("-")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierParams {
    pub proximity: f64,
    pub collision_radius: f64,
    pub interaction_radius: f64,
    pub standing_speed: f64,
    pub standing_corridor: f64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            proximity: 0.5,
            collision_radius: 1.0,
            interaction_radius: 20.0,
            standing_speed: 0.1,
            standing_corridor: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub class: Class,
    pub time: f64,
    pub distance: f64,
    pub prediction: Option<Prediction>,
    pub standing: bool,
}

/// Labels the track at its latest observation; `None` when the track has no
/// observation or is outside the interaction radius.
pub fn classify(
    track: &PedestrianTrack,
    path: &VehiclePath,
    params: &ClassifierParams,
    predictor: &dyn Predictor,
) -> Option<Assessment> {
    let now = track.latest()?;
    let distance = now.position.distance(&path.position_at(now.time));
    if distance > params.interaction_radius {
        return None;
    }
    let prediction = predictor.predict(track.history());
    let mut standing = false;
    let class = if distance < params.proximity {
        Class::Red
    } else if let Some(pred) = &prediction {
        let horizon_end = pred.points.last().map_or(now.time, |o| o.time);
        let speed = pred
            .points
            .first()
            .map_or(0.0, |o| o.position.distance(&now.position) / (o.time - now.time).max(f64::MIN_POSITIVE));
        standing = speed < params.standing_speed;
        let conflict = if standing {
            path.distance_during(now.position, now.time, horizon_end) < params.standing_corridor
        } else {
            pred.points.iter().any(|o| o.position.distance(&path.position_at(o.time)) < params.collision_radius)
        };
        if conflict {
            Class::Blue
        } else {
            Class::Green
        }
    } else {
        Class::Green
    };
    Some(Assessment { class, time: now.time, distance, prediction, standing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::predict::ConstantVelocity;

    fn track(points: &[(f64, f64, f64)]) -> PedestrianTrack {
        let mut t = PedestrianTrack::new(1);
        for &(time, x, y) in points {
            t.observe(time, Vec2::new(x, y)).unwrap();
        }
        t
    }

    fn still_vehicle() -> VehiclePath {
        VehiclePath::straight(Vec2::default(), Vec2::default(), 0.0, 10.0)
    }

    #[test]
    fn close_is_red() {
        let t = track(&[(0.0, 0.4, 0.0)]);
        let a = classify(&t, &still_vehicle(), &ClassifierParams::default(), &ConstantVelocity).unwrap();
        assert_eq!(a.class, Class::Red);
        assert!(a.prediction.is_none());
    }

    #[test]
    fn crossing_walker_is_blue() {
        // Vehicle along +x at 1.5 m/s; pedestrian 10 m away at (6, -8) walking
        // +y at 2 m/s. Both reach (6, 0) at t = 4 s, the 10th prediction step.
        let path = VehiclePath::straight(Vec2::default(), Vec2::new(1.5, 0.0), 0.0, 20.0);
        let pts: Vec<_> = (0..8).map(|k| (-2.8 + 0.4 * k as f64, 6.0, -8.0 - 2.0 * (2.8 - 0.4 * k as f64))).collect();
        let t = track(&pts);
        let a = classify(&t, &path, &ClassifierParams::default(), &ConstantVelocity).unwrap();
        assert!((a.distance - 10.0).abs() < 1e-9);
        assert_eq!(a.class, Class::Blue);
        let meet = a.prediction.unwrap().points[9];
        assert!((meet.time - 4.0).abs() < 1e-9);
        assert!(meet.position.distance(&Vec2::new(6.0, 0.0)) < 1e-9);
    }

    #[test]
    fn receding_walker_is_green_and_far_is_untracked() {
        let pts: Vec<_> = (0..8).map(|k| (0.4 * k as f64, 9.0 + 0.4 * k as f64, 12.0 + 0.4 * k as f64)).collect();
        let a = classify(&track(&pts), &still_vehicle(), &ClassifierParams::default(), &ConstantVelocity).unwrap();
        assert_eq!(a.class, Class::Green);
        assert!(classify(
            &track(&[(0.0, 30.0, 0.0)]),
            &still_vehicle(),
            &ClassifierParams::default(),
            &ConstantVelocity
        )
        .is_none());
    }

    #[test]
    fn standing_on_path_is_blue() {
        let path = VehiclePath::straight(Vec2::default(), Vec2::new(1.0, 0.0), 0.0, 20.0);
        let pts: Vec<_> = (0..8).map(|k| (0.4 * k as f64, 5.0, 1.2)).collect();
        let a = classify(&track(&pts), &path, &ClassifierParams::default(), &ConstantVelocity).unwrap();
        assert!(a.standing);
        assert_eq!(a.class, Class::Blue);
        assert_eq!(sequence(&[Class::Green, Class::Blue, Class::Red]), "G-B-R");
    }
}
