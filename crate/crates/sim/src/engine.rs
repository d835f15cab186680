//! Route replay.
//!
//! Each arc takes `base · Σ_s (share_s / β_s) + δ`, clamped at zero, where
//! `base` is the unmodulated time, `share_s` the fraction of the arc's
//! roughness profile covered by segment `s`, `β_s` the speed factor of the
//! segment's class (1 when VMM is off) and `δ ~ U[-ε, ε]`. With stop-on-red,
//! the time any encountered pedestrian spends labelled red is added as a
//! standstill. Service starts follow the earliest-start rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lastmile_core::model::{Instance, Solution, FEASIBILITY_TOL};
use lastmile_perception::{classify, Segment};
use lastmile_safety::{run_scenario, Class, ConstantVelocity};

use crate::config::{ArcTiming, SimConfig};
use crate::error::SimError;
use crate::report::{ArcRecord, SimReport, SimVocalEvent, VibrationSample};

fn check_config(instance: &Instance, config: &SimConfig) -> Result<(), SimError> {
    if !(config.nominal_speed > 0.0 && config.nominal_speed.is_finite()) {
        return Err(SimError::InvalidSpeed(config.nominal_speed));
    }
    if !(config.epsilon >= 0.0 && config.epsilon.is_finite()) {
        return Err(SimError::InvalidEpsilon(config.epsilon));
    }
    if config.timing == ArcTiming::Geometry && instance.coords().is_none() {
        return Err(SimError::MissingGeometry);
    }
    let n = instance.n();
    for &(from, to) in config.roughness.keys().chain(config.pedestrians.keys()) {
        if from > n || to > n || from == to {
            return Err(SimError::UnknownArc { from, to });
        }
    }
    Ok(())
}

fn base_time(instance: &Instance, config: &SimConfig, from: usize, to: usize) -> f64 {
    match (config.timing, instance.coords()) {
        (ArcTiming::Geometry, Some(c)) => c[from].distance(&c[to]) / config.nominal_speed,
        _ => instance.nominal(from, to),
    }
}

/// Independent stream per (vehicle, leg) so arcs do not share draws.
fn arc_rng(seed: u64, vehicle: usize, leg: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((vehicle as u64) << 32) | leg as u64);
    rng
}

struct Traversal {
    modulated: f64,
    perturbation: f64,
    vibration: Vec<VibrationSample>,
}

fn traverse(
    base: f64,
    segments: Option<&[Segment]>,
    config: &SimConfig,
    depart: f64,
    rng: &mut ChaCha8Rng,
) -> Traversal {
    let perturbation = if config.epsilon > 0.0 { rng.gen_range(-config.epsilon..=config.epsilon) } else { 0.0 };
    let Some(segments) = segments.filter(|s| !s.is_empty()) else {
        return Traversal { modulated: base, perturbation, vibration: Vec::new() };
    };
    let total: f64 = segments.iter().map(|s| s.length).sum();
    let cruise = if base > 0.0 { total / base } else { 0.0 };
    let betas: Vec<f64> =
        segments.iter().map(|s| if config.vmm_enabled { classify(s.roughness).beta() } else { 1.0 }).collect();
    let modulated = if betas.iter().all(|&b| b == 1.0) {
        base
    } else {
        base * segments.iter().zip(&betas).map(|(s, b)| s.length / total / b).sum::<f64>()
    };
    let mut clock = depart;
    let mut vibration = Vec::with_capacity(segments.len());
    for (s, &b) in segments.iter().zip(&betas) {
        let speed = cruise * b;
        let duration = base * (s.length / total) / b;
        vibration.push(VibrationSample {
            time: clock,
            duration,
            magnitude: config.kappa * speed * speed * s.roughness,
        });
        clock += duration;
    }
    Traversal { modulated, perturbation, vibration }
}

/// Length of the union of red intervals; a red label lasts until the track's
/// next label.
fn red_time(labels_by_track: &[Vec<(f64, Class)>]) -> f64 {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for labels in labels_by_track {
        for (i, &(t, c)) in labels.iter().enumerate() {
            if c == Class::Red {
                let end = labels.get(i + 1).map_or(t, |l| l.0);
                intervals.push((t, end));
            }
        }
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (s, e) in intervals {
        match current {
            Some((cs, ce)) if s <= ce => current = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                current = Some((s, e));
            }
            None => current = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = current {
        total += ce - cs;
    }
    total
}

pub fn simulate(instance: &Instance, solution: &Solution, config: &SimConfig) -> Result<SimReport, SimError> {
    check_config(instance, config)?;
    let n = instance.n();
    let mut report = SimReport::new(n);
    let mut served = vec![false; n + 1];
    for (ridx, route) in solution.routes.iter().enumerate() {
        if route.vehicle >= instance.num_vehicles() {
            return Err(SimError::InvalidRoute { route: ridx, message: format!("unknown vehicle {}", route.vehicle) });
        }
        if let Some(&bad) = route.stops.iter().find(|&&c| c == 0 || c > n) {
            return Err(SimError::InvalidRoute { route: ridx, message: format!("unknown customer {bad}") });
        }
        if route.stops.len() > instance.capacity(route.vehicle) as usize {
            report.capacity_violations.push(route.vehicle);
        }
        let mut prev = 0usize;
        let mut clock = 0.0f64;
        let mut route_sum = 0.0f64;
        for (leg, &stop) in route.stops.iter().enumerate() {
            let depart = clock + instance.service(prev);
            let base = base_time(instance, config, prev, stop);
            let mut rng = arc_rng(config.seed, route.vehicle, leg);
            let tr = traverse(base, config.roughness.get(&(prev, stop)).map(Vec::as_slice), config, depart, &mut rng);
            let mut red_delay = 0.0;
            if let Some(scenario) = config.pedestrians.get(&(prev, stop)) {
                let out = run_scenario(scenario, &config.classifier, &ConstantVelocity)?;
                for e in &out.events {
                    report.vocal_log.push(SimVocalEvent {
                        time: depart + e.time,
                        vehicle: route.vehicle,
                        from: prev,
                        to: stop,
                        track_id: e.track_id,
                        class: e.class,
                    });
                }
                if config.stop_on_red {
                    let labels: Vec<_> = out.tracks.iter().map(|t| t.label_history.clone()).collect();
                    red_delay = red_time(&labels);
                }
            }
            let time = (tr.modulated + tr.perturbation).max(0.0) + red_delay;
            let arrival = depart + time;
            let w = instance.window(stop);
            let start = arrival.max(w.start);
            report.latency[stop] = start;
            route_sum += start;
            report.idle[stop] = start - arrival;
            if served[stop] {
                report.duplicated.push(stop);
            }
            served[stop] = true;
            if start > w.end + FEASIBILITY_TOL {
                report.window_violations.push(stop);
            }
            report.arcs.push(ArcRecord {
                vehicle: route.vehicle,
                from: prev,
                to: stop,
                depart,
                base,
                modulated: tr.modulated,
                perturbation: tr.perturbation,
                red_delay,
                time,
            });
            report.vibration.extend(tr.vibration);
            clock = start;
            prev = stop;
        }
        report.objective += route_sum;
    }
    report.unserved = (1..=n).filter(|&c| !served[c]).collect();
    report.vocal_log.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.vehicle.cmp(&b.vehicle)));
    report.vibration.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(report)
}

/// Independent replays with seeds `config.seed + run`, run in parallel.
pub fn simulate_batch(
    instance: &Instance,
    solution: &Solution,
    config: &SimConfig,
    runs: usize,
) -> Result<Vec<SimReport>, SimError> {
    (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let cfg = SimConfig { seed: config.seed.wrapping_add(run), ..config.clone() };
            simulate(instance, solution, &cfg)
        })
        .collect()
}

/// Drives every ordered arc `repetitions` times and averages the traversal
/// times into a nominal matrix, depot first. Requires node coordinates.
pub fn estimate_nominals(
    instance: &Instance,
    config: &SimConfig,
    repetitions: usize,
) -> Result<Vec<Vec<f64>>, SimError> {
    let coords = instance.coords().ok_or(SimError::MissingGeometry)?;
    let geometric = SimConfig { timing: ArcTiming::Geometry, ..config.clone() };
    check_config(instance, &geometric)?;
    let size = coords.len();
    let reps = repetitions.max(1);
    let mut matrix = vec![vec![0.0; size]; size];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let base = base_time(instance, &geometric, i, j);
            let segments = geometric.roughness.get(&(i, j)).map(Vec::as_slice);
            let mut sum = 0.0;
            for r in 0..reps {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((i * size + j) as u64) << 20 | r as u64);
                let tr = traverse(base, segments, &geometric, 0.0, &mut rng);
                sum += (tr.modulated + tr.perturbation).max(0.0);
            }
            *cell = sum / reps as f64;
        }
    }
    Ok(matrix)
}
