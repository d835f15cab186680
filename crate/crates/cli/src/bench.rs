//! Runtime and objective versus fleet size on random instances.
//!
//! Instance `i` of every fleet size uses seed `seed + i`, so each fleet size
//! sees the same customer geometry. Every instance is solved by the heuristic
//! and then by the exact solver warm-started with the heuristic solution.
//! Results are written one fleet-size batch at a time; rerunning with the same
//! flags skips batches already present in the CSV.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use lastmile_core::instances::{generate_random_with, RandomConfig};
use lastmile_core::{build_model, solve_exact, solve_heuristic, ExactOptions, SolveStatus};

use crate::svg::{line_chart, Series};

pub const CSV_HEADER: &str = "instance_id,n,k,solver,status,objective,runtime_s";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("time limit must be positive")]
    InvalidTimeLimit,
    #[error("fleet sizes must be positive")]
    InvalidFleet,
    #[error("existing results were produced with different flags: `{found}`")]
    FlagMismatch { found: String },
    #[error("results file line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n: usize,
    pub fleet_sizes: Vec<usize>,
    pub instances_per_point: usize,
    pub seed: u64,
    pub time_limit: Duration,
    pub epsilon: f64,
    pub heuristic_budget: usize,
    pub robust: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 11,
            fleet_sizes: vec![2, 4, 6, 8, 10],
            instances_per_point: 10,
            seed: 0,
            time_limit: Duration::from_secs(120),
            epsilon: 0.0,
            heuristic_budget: 40,
            robust: true,
        }
    }
}

impl BenchConfig {
    /// Echo of every flag that affects the results.
    pub fn header(&self) -> String {
        let fleet: Vec<String> = self.fleet_sizes.iter().map(|k| k.to_string()).collect();
        format!(
            "# lastmile bench n={} fleet={} instances={} seed={} time_limit={} epsilon={} budget={} robust={}",
            self.n,
            fleet.join(","),
            self.instances_per_point,
            self.seed,
            self.time_limit.as_secs_f64(),
            self.epsilon,
            self.heuristic_budget,
            self.robust
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SolverKind {
    Heuristic,
    Exact,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Heuristic => "heuristic",
            SolverKind::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance_id: String,
    pub n: usize,
    pub k: usize,
    pub solver: SolverKind,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub runtime_s: f64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        let objective = self.objective.map(|o| o.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.instance_id,
            self.n,
            self.k,
            self.solver.as_str(),
            self.status.as_str(),
            objective,
            self.runtime_s
        )
    }

    fn parse(row: &str, line: usize) -> Result<BenchRecord, BenchError> {
        let bad = |message: &str| BenchError::Malformed { line, message: message.to_string() };
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let solver = match f[3] {
            "heuristic" => SolverKind::Heuristic,
            "exact" => SolverKind::Exact,
            _ => return Err(bad("unknown solver")),
        };
        let status = match f[4] {
            "optimal" => SolveStatus::Optimal,
            "feasible" => SolveStatus::FeasibleAtLimit,
            "infeasible" => SolveStatus::Infeasible,
            "timeout" => SolveStatus::TimedOut,
            _ => return Err(bad("unknown status")),
        };
        let objective = if f[5].is_empty() { None } else { Some(f[5].parse().map_err(|_| bad("bad objective"))?) };
        Ok(BenchRecord {
            instance_id: f[0].to_string(),
            n: f[1].parse().map_err(|_| bad("bad n"))?,
            k: f[2].parse().map_err(|_| bad("bad k"))?,
            solver,
            status,
            objective,
            runtime_s: f[6].parse().map_err(|_| bad("bad runtime"))?,
        })
    }

    fn order_key(&self) -> (usize, &str, SolverKind) {
        (self.k, &self.instance_id, self.solver)
    }
}

/// Records of one instance: heuristic first, then the warm-started exact solve.
pub fn bench_instance(config: &BenchConfig, k: usize, index: usize) -> [BenchRecord; 2] {
    let gen = RandomConfig { epsilon: config.epsilon, ..RandomConfig::default() };
    let instance = generate_random_with(config.n, k, config.seed + index as u64, &gen);
    let id = instance.name().to_string();
    let record = |solver, status, objective, runtime_s| BenchRecord {
        instance_id: id.clone(),
        n: config.n,
        k,
        solver,
        status,
        objective,
        runtime_s,
    };

    let started = Instant::now();
    let heuristic = solve_heuristic(&instance, config.robust, config.seed, config.heuristic_budget).ok();
    let heuristic_time = started.elapsed().as_secs_f64();
    let h = match &heuristic {
        Some(s) => record(SolverKind::Heuristic, SolveStatus::FeasibleAtLimit, Some(s.objective), heuristic_time),
        None => record(SolverKind::Heuristic, SolveStatus::Infeasible, None, heuristic_time),
    };

    let model = build_model(&instance, config.robust);
    let options = ExactOptions { warm_start: heuristic, ..ExactOptions::with_time_limit(config.time_limit) };
    let started = Instant::now();
    let e = match solve_exact(&model, &options) {
        Ok(out) => record(SolverKind::Exact, out.status, out.objective(), started.elapsed().as_secs_f64()),
        Err(_) => record(SolverKind::Exact, SolveStatus::TimedOut, None, started.elapsed().as_secs_f64()),
    };
    [h, e]
}

/// Reads a results file written by [`bench_fleet_sweep`] with the same flags.
pub fn read_results(text: &str, config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if i == 0 {
            if line != config.header() {
                return Err(BenchError::FlagMismatch { found: line.to_string() });
            }
            continue;
        }
        if line.is_empty() || line == CSV_HEADER {
            continue;
        }
        records.push(BenchRecord::parse(line, line_no)?);
    }
    Ok(records)
}

pub fn records_csv(config: &BenchConfig, records: &[BenchRecord]) -> String {
    let mut out = format!("{}\n{CSV_HEADER}\n", config.header());
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Runs the sweep, appending each finished fleet-size batch to `csv_path`
/// when given. Returns all records, including those resumed from the file,
/// ordered by fleet size, instance and solver.
pub fn bench_fleet_sweep(config: &BenchConfig, csv_path: Option<&Path>) -> Result<Vec<BenchRecord>, BenchError> {
    if config.time_limit.is_zero() {
        return Err(BenchError::InvalidTimeLimit);
    }
    if config.fleet_sizes.iter().any(|&k| k == 0) {
        return Err(BenchError::InvalidFleet);
    }
    let mut records = match csv_path {
        Some(p) if p.exists() => read_results(&fs::read_to_string(p)?, config)?,
        _ => Vec::new(),
    };
    if let Some(p) = csv_path {
        if !p.exists() {
            fs::write(p, records_csv(config, &[]))?;
        }
    }
    let done: BTreeSet<usize> = records.iter().map(|r| r.k).collect();
    for &k in &config.fleet_sizes {
        if done.contains(&k) {
            continue;
        }
        let mut batch: Vec<BenchRecord> =
            (0..config.instances_per_point).into_par_iter().flat_map_iter(|i| bench_instance(config, k, i)).collect();
        batch.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        if let Some(p) = csv_path {
            let mut file = fs::OpenOptions::new().append(true).open(p)?;
            let mut chunk = String::new();
            for r in &batch {
                let _ = writeln!(chunk, "{}", r.csv_row());
            }
            file.write_all(chunk.as_bytes())?;
            file.sync_data()?;
        }
        records.extend(batch);
    }
    records.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub k: usize,
    pub median_runtime_s: f64,
    /// Mean over runs that returned a solution; NaN when none did.
    pub mean_objective: f64,
    pub runs: usize,
    pub solved: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

pub fn summarize(records: &[BenchRecord], solver: SolverKind) -> Vec<PointSummary> {
    let ks: BTreeSet<usize> = records.iter().map(|r| r.k).collect();
    ks.into_iter()
        .map(|k| {
            let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.k == k && r.solver == solver).collect();
            let mut times: Vec<f64> = rs.iter().map(|r| r.runtime_s).collect();
            let objs: Vec<f64> = rs.iter().filter_map(|r| r.objective).collect();
            let mean = if objs.is_empty() { f64::NAN } else { objs.iter().sum::<f64>() / objs.len() as f64 };
            PointSummary {
                k,
                median_runtime_s: median(&mut times),
                mean_objective: mean,
                runs: rs.len(),
                solved: objs.len(),
            }
        })
        .collect()
}

pub fn summary_text(records: &[BenchRecord]) -> String {
    let mut out = String::from("solver,k,runs,solved,median_runtime_s,mean_objective\n");
    for solver in [SolverKind::Heuristic, SolverKind::Exact] {
        for p in summarize(records, solver) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                solver.as_str(),
                p.k,
                p.runs,
                p.solved,
                p.median_runtime_s,
                p.mean_objective
            );
        }
    }
    out
}

fn series(records: &[BenchRecord], pick: fn(&PointSummary) -> f64) -> Vec<Series> {
    [SolverKind::Exact, SolverKind::Heuristic]
        .into_iter()
        .map(|s| Series {
            name: s.as_str().to_string(),
            points: summarize(records, s).iter().map(|p| (p.k as f64, pick(p))).collect(),
        })
        .collect()
}

pub fn runtime_svg(records: &[BenchRecord]) -> String {
    line_chart("Median running time", "number of vehicles", "seconds", &series(records, |p| p.median_runtime_s))
}

pub fn objective_svg(records: &[BenchRecord]) -> String {
    line_chart("Mean objective", "number of vehicles", "sum of latencies (s)", &series(records, |p| p.mean_objective))
}
