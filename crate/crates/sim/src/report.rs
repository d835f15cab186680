use std::fmt::Write as _;

use lastmile_safety::Class;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcRecord {
    pub vehicle: usize,
    pub from: usize,
    pub to: usize,
    pub depart: f64,
    /// Unmodulated traversal time.
    pub base: f64,
    /// Time after speed modulation, before perturbation.
    pub modulated: f64,
    pub perturbation: f64,
    pub red_delay: f64,
    /// Realized traversal time.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibrationSample {
    pub time: f64,
    pub duration: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimVocalEvent {
    pub time: f64,
    pub vehicle: usize,
    pub from: usize,
    pub to: usize,
    pub track_id: u32,
    pub class: Class,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VibrationSummary {
    pub peak: f64,
    /// Time-weighted mean over the sampled segments.
    pub mean: f64,
    /// `Σ magnitude · duration`.
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Realized service starts by node id (depot entry is zero).
    pub latency: Vec<f64>,
    pub idle: Vec<f64>,
    pub objective: f64,
    pub window_violations: Vec<usize>,
    pub capacity_violations: Vec<usize>,
    pub unserved: Vec<usize>,
    pub duplicated: Vec<usize>,
    pub arcs: Vec<ArcRecord>,
    pub vibration: Vec<VibrationSample>,
    pub vocal_log: Vec<SimVocalEvent>,
}

impl SimReport {
    pub(crate) fn new(n: usize) -> Self {
        SimReport {
            latency: vec![0.0; n + 1],
            idle: vec![0.0; n + 1],
            objective: 0.0,
            window_violations: Vec::new(),
            capacity_violations: Vec::new(),
            unserved: Vec::new(),
            duplicated: Vec::new(),
            arcs: Vec::new(),
            vibration: Vec::new(),
            vocal_log: Vec::new(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.window_violations.is_empty()
            && self.capacity_violations.is_empty()
            && self.unserved.is_empty()
            && self.duplicated.is_empty()
    }

    pub fn total_idle(&self) -> f64 {
        self.idle.iter().sum()
    }

    pub fn vibration_summary(&self) -> VibrationSummary {
        let peak = self.vibration.iter().map(|v| v.magnitude).fold(0.0, f64::max);
        // `+ 0.0` turns the empty sum's -0.0 into 0.0.
        let integral: f64 = self.vibration.iter().map(|v| v.magnitude * v.duration).sum::<f64>() + 0.0;
        let span: f64 = self.vibration.iter().map(|v| v.duration).sum();
        VibrationSummary { peak, mean: if span > 0.0 { integral / span } else { 0.0 }, integral }
    }

    /// `customer,latency,idle`, one row per served customer.
    pub fn customers_csv(&self) -> String {
        let mut out = String::from("customer,latency,idle,late\n");
        let mut stops: Vec<usize> = self.arcs.iter().map(|a| a.to).collect();
        stops.sort_unstable();
        stops.dedup();
        for c in stops {
            let late = self.window_violations.contains(&c);
            let _ = writeln!(out, "{c},{},{},{late}", self.latency[c], self.idle[c]);
        }
        out
    }

    pub fn arcs_csv(&self) -> String {
        let mut out = String::from("vehicle,from,to,depart,base,modulated,perturbation,red_delay,time\n");
        for a in &self.arcs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                a.vehicle, a.from, a.to, a.depart, a.base, a.modulated, a.perturbation, a.red_delay, a.time
            );
        }
        out
    }

    pub fn vibration_csv(&self) -> String {
        let mut out = String::from("time,duration,magnitude\n");
        for v in &self.vibration {
            let _ = writeln!(out, "{},{},{}", v.time, v.duration, v.magnitude);
        }
        out
    }

    pub fn events_csv(&self) -> String {
        let mut out = String::from("time,track_id,class,event\n");
        for e in &self.vocal_log {
            let _ = writeln!(out, "{},{},{},vocalize", e.time, e.track_id, e.class);
        }
        out
    }

    pub fn summary(&self) -> String {
        let v = self.vibration_summary();
        let mut out = String::new();
        let _ = writeln!(out, "objective (sum of service starts): {:.3} s", self.objective);
        let _ = writeln!(out, "total idle: {:.3} s", self.total_idle());
        let _ = writeln!(out, "arcs driven: {}", self.arcs.len());
        let _ = writeln!(out, "late customers: {:?}", self.window_violations);
        if !self.unserved.is_empty() {
            let _ = writeln!(out, "unserved customers: {:?}", self.unserved);
        }
        let _ = writeln!(out, "vibration peak / mean / integral: {:.4} / {:.4} / {:.4}", v.peak, v.mean, v.integral);
        let _ = writeln!(out, "vocal warnings: {}", self.vocal_log.len());
        out
    }
}
