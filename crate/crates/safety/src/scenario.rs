//! Scenario files and the replay loop.
//!
//! Text format, one record per line (`#` starts a comment):
//!
//! ```text
//! V <t> <x> <y>         vehicle path waypoint
//! P <t> <id> <x> <y>    pedestrian observation
//! Q <t>                 evaluation time for phase labels
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::classify::{classify, Class, ClassifierParams};
use crate::error::SafetyError;
use crate::geometry::Vec2;
use crate::predict::Predictor;
use crate::track::{Observation, PedestrianTrack, VehiclePath};
use crate::vocalizer::{vocalizer_events, VocalEvent};

const TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sighting {
    pub time: f64,
    pub track_id: u32,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub path: VehiclePath,
    pub sightings: Vec<Sighting>,
    pub queries: Vec<f64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, SafetyError> {
        let mut waypoints = Vec::new();
        let mut sightings = Vec::new();
        let mut queries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| SafetyError::Parse { line: idx + 1, message: format!("{message}: {line:?}") };
            let mut fields = line.split_whitespace();
            let tag = fields.next().expect("non-empty line");
            let nums: Vec<f64> =
                fields.map(|f| f.parse::<f64>().map_err(|_| err("bad number"))).collect::<Result<_, _>>()?;
            if nums.iter().any(|v| !v.is_finite()) {
                return Err(err("non-finite value"));
            }
            match (tag, nums.as_slice()) {
                ("V", &[t, x, y]) => waypoints.push(Observation { time: t, position: Vec2::new(x, y) }),
                ("P", &[t, id, x, y]) if id >= 0.0 && id.fract() == 0.0 => {
                    sightings.push(Sighting { time: t, track_id: id as u32, position: Vec2::new(x, y) })
                }
                ("Q", &[t]) => queries.push(t),
                _ => return Err(err("expected `V t x y`, `P t id x y` or `Q t`")),
            }
        }
        let path = VehiclePath::new(waypoints).map_err(|e| SafetyError::Parse { line: 0, message: e.to_string() })?;
        Ok(Scenario { path, sightings, queries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in self.path.waypoints() {
            let _ = writeln!(out, "V {} {} {}", w.time, w.position.x, w.position.y);
        }
        for s in &self.sightings {
            let _ = writeln!(out, "P {} {} {} {}", s.time, s.track_id, s.position.x, s.position.y);
        }
        for q in &self.queries {
            let _ = writeln!(out, "Q {q}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    /// Tracks in id order, each with its label history.
    pub tracks: Vec<PedestrianTrack>,
    /// Vocalizer events of all tracks, by time then track id.
    pub events: Vec<VocalEvent>,
    /// Most severe label across tracks at each evaluation time.
    pub phases: Vec<Class>,
}

/// Replays sightings in time order, labelling each track after every
/// observation. A track that leaves the interaction radius after being
/// labelled ends its interaction and receives no further labels.
pub fn run_scenario(
    scenario: &Scenario,
    params: &ClassifierParams,
    predictor: &dyn Predictor,
) -> Result<ScenarioOutcome, SafetyError> {
    let mut order: Vec<&Sighting> = scenario.sightings.iter().collect();
    order.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.track_id.cmp(&b.track_id)));
    let mut tracks: BTreeMap<u32, (PedestrianTrack, bool)> = BTreeMap::new();
    for s in order {
        let (track, ended) = tracks.entry(s.track_id).or_insert_with(|| (PedestrianTrack::new(s.track_id), false));
        track.observe(s.time, s.position)?;
        if *ended {
            continue;
        }
        match classify(track, &scenario.path, params, predictor) {
            Some(a) => {
                track.prediction = a.prediction.map(|p| p.points).unwrap_or_default();
                track.label_history.push((a.time, a.class));
            }
            None if !track.label_history.is_empty() => *ended = true,
            None => {}
        }
    }
    let tracks: Vec<PedestrianTrack> = tracks.into_values().map(|(t, _)| t).collect();

    let mut events: Vec<VocalEvent> = tracks.iter().flat_map(|t| vocalizer_events(t.id, &t.label_history)).collect();
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.track_id.cmp(&b.track_id)));

    let queries = if scenario.queries.is_empty() { default_queries(&tracks) } else { scenario.queries.clone() };
    let phases = queries
        .iter()
        .map(|&q| {
            tracks
                .iter()
                .filter_map(|t| t.label_history.iter().rev().find(|(time, _)| *time <= q + TIME_TOL).map(|l| l.1))
                .max()
                .unwrap_or(Class::Green)
        })
        .collect();
    Ok(ScenarioOutcome { tracks, events, phases })
}

/// First, middle and last labelling times over all tracks.
fn default_queries(tracks: &[PedestrianTrack]) -> Vec<f64> {
    let mut times: Vec<f64> = tracks.iter().flat_map(|t| t.label_history.iter().map(|l| l.0)).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    if times.is_empty() {
        return Vec::new();
    }
    vec![times[0], times[times.len() / 2], times[times.len() - 1]]
}
