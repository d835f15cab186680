//! Subcommands of the `lastmile` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, SolverKind};
use crate::input::{load_any, Overrides};
use lastmile_core::instances::{
    field_test_pentagon, generate_random_with, instance_to_string, load_solution, save_instance, save_solution,
    RandomConfig,
};
use lastmile_core::{
    build_model, solve_bruteforce, solve_exact, solve_heuristic, worst_case_check, ExactOptions, Instance, Solution,
    SolveStatus,
};
use lastmile_perception::{
    fit_plane_ransac, roughness_grid, speed_factor, synth_cloud, Lookahead, PointCloud, RansacParams, RoughnessProfile,
};
use lastmile_safety::{
    events_csv, run_scenario, scripted_interactions, sequence, ClassifierParams, ConstantVelocity, Scenario,
};
use lastmile_sim::{parse_segments, simulate, simulate_batch, ArcTiming, SimConfig};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_INPUT: u8 = 4;

/// Marks errors caused by bad user input (exit code 4).
#[derive(Debug)]
struct BadInput(anyhow::Error);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(&self.0))
    }
}

/// Error chain joined by `: `, skipping causes already quoted by their parent.
fn render(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if msg.contains(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

impl std::error::Error for BadInput {}

fn input<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| BadInput(e.into()).into())
}

#[derive(Parser)]
#[command(name = "lastmile", version, about = "Robust last-mile delivery routing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the exact or heuristic solver.
    Solve(SolveArgs),
    /// Solve by exhaustive enumeration (at most 9 customers).
    Oracle(OracleArgs),
    /// Replay a solution under noise, roughness and pedestrians.
    Simulate(SimulateArgs),
    /// Generate a random instance or the pentagon field-test instance.
    GenInstance(GenArgs),
    /// Convert a benchmark text file into the native format.
    Parse(ParseArgs),
    /// Fit the ground plane of a point cloud and grade its roughness.
    Roughness(RoughnessArgs),
    /// Label pedestrians of a scenario and list vocal warnings.
    Classify(ClassifyArgs),
    /// Runtime and objective versus fleet size on random instances.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Native JSON instance or benchmark text file.
    #[arg(long)]
    instance: PathBuf,
    /// Override the number of vehicles.
    #[arg(long)]
    vehicles: Option<usize>,
    /// Override every vehicle's capacity.
    #[arg(long)]
    capacity: Option<u32>,
    /// Override the uncertainty half-width ε.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        input(load_any(
            &self.instance,
            &Overrides { vehicles: self.vehicles, capacity: self.capacity, epsilon: self.epsilon },
        ))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Exact,
    Heuristic,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "exact")]
    solver: SolverChoice,
    /// Schedule with worst-case durations d̄ + ε.
    #[arg(long)]
    robust: bool,
    /// Exact solver time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Heuristic iteration budget (ten iterations per restart).
    #[arg(long, default_value_t = 40)]
    budget: usize,
    /// Skip the heuristic warm start of the exact solver.
    #[arg(long)]
    no_warm_start: bool,
    /// Write the solution here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the mixed-integer model in LP format here.
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    robust: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Native solution file.
    #[arg(long)]
    solution: PathBuf,
    /// key = value simulation settings; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Perturbation half-width for the replay.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cruise speed in m/s.
    #[arg(long)]
    speed: Option<f64>,
    /// Use straight-line distance over speed instead of d̄.
    #[arg(long)]
    geometry: bool,
    #[arg(long)]
    no_vmm: bool,
    #[arg(long)]
    stop_on_red: bool,
    /// Number of replays with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Directory for the CSV outputs of the first run.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 11)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    vehicles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Emit the five-stop pentagon field-test instance instead.
    #[arg(long)]
    pentagon: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParseArgs {
    /// Benchmark text file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    vehicles: Option<usize>,
    #[arg(long)]
    capacity: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoughnessArgs {
    /// Point cloud, one `x y z` per line.
    #[arg(long, conflicts_with = "profile")]
    cloud: Option<PathBuf>,
    /// Synthesize the cloud from `length:roughness` segments, e.g. `36:0.10,14:0`.
    #[arg(long)]
    profile: Option<String>,
    /// Points per square meter of the synthetic cloud.
    #[arg(long, default_value_t = 100.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    #[arg(long, default_value_t = 0.03)]
    threshold: f64,
    /// Grid CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, required_unless_present = "scripted")]
    scenario: Option<PathBuf>,
    /// Run the built-in scripted interactions.
    #[arg(long)]
    scripted: bool,
    #[arg(long)]
    proximity: Option<f64>,
    /// Events CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 11)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
    fleet: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 120.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 40)]
    budget: usize,
    /// Solve with nominal durations instead of d̄ + ε.
    #[arg(long)]
    nominal: bool,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
}

/// Output sink plus the header line echoing the invocation.
struct Ctx<'a> {
    out: &'a mut dyn Write,
    header: String,
}

/// Write errors (e.g. a closed pipe) are ignored; the command still finishes.
macro_rules! say {
    ($ctx:expr, $($t:tt)*) => {{
        let _ = writeln!($ctx.out, $($t)*);
    }};
}

macro_rules! put {
    ($ctx:expr, $($t:tt)*) => {{
        let _ = write!($ctx.out, $($t)*);
    }};
}

fn seconds(s: f64) -> Result<Duration> {
    input(Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid time limit {s}")))
}

fn print_solution(c: &mut Ctx, instance: &Instance, solution: &Solution) {
    say!(c, "objective: {}", solution.objective);
    for r in &solution.routes {
        let stops: Vec<String> = r.stops.iter().map(|s| s.to_string()).collect();
        say!(c, "vehicle {}: 0 -> {} ", r.vehicle, stops.join(" -> "));
    }
    say!(c, "customer,latency,idle,window_start,window_end");
    for i in instance.customers() {
        let w = instance.window(i);
        say!(c, "{i},{},{},{},{}", solution.latency[i], solution.idle[i], w.start, w.end);
    }
}

fn finish(c: &mut Ctx, instance: &Instance, solution: &Solution, out: Option<&Path>) -> Result<()> {
    print_solution(c, instance, solution);
    let wc = worst_case_check(instance, solution);
    say!(c, "worst-case feasible: {} (objective {})", wc.feasible, wc.objective);
    if let Some(p) = out {
        save_solution(solution, p).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_solve(c: &mut Ctx, a: &SolveArgs) -> Result<u8> {
    let instance = a.instance.load()?;
    say!(c, "{}", c.header);
    say!(
        c,
        "instance: {} (n={}, vehicles={}, epsilon={})",
        instance.name(),
        instance.n(),
        instance.num_vehicles(),
        instance.epsilon()
    );
    if let Some(p) = &a.lp {
        let mut f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        build_model(&instance, a.robust).write_lp(&mut f)?;
    }
    match a.solver {
        SolverChoice::Heuristic => match solve_heuristic(&instance, a.robust, a.seed, a.budget) {
            Ok(s) => {
                say!(c, "status: feasible");
                finish(c, &instance, &s, a.out.as_deref())?;
                Ok(0)
            }
            Err(e) => {
                say!(c, "status: infeasible ({e})");
                Ok(EXIT_INFEASIBLE)
            }
        },
        SolverChoice::Exact => {
            let warm = if a.no_warm_start { None } else { solve_heuristic(&instance, a.robust, a.seed, a.budget).ok() };
            let options = ExactOptions { warm_start: warm, ..ExactOptions::with_time_limit(seconds(a.time_limit)?) };
            let out = input(solve_exact(&build_model(&instance, a.robust), &options))?;
            say!(c, "status: {}", out.status.as_str());
            say!(c, "lower bound: {}", out.lower_bound);
            say!(c, "nodes: {}", out.nodes);
            say!(c, "runtime_s: {}", out.elapsed.as_secs_f64());
            if let Some(s) = &out.solution {
                finish(c, &instance, s, a.out.as_deref())?;
            }
            Ok(match out.status {
                SolveStatus::Optimal => 0,
                SolveStatus::Infeasible => EXIT_INFEASIBLE,
                SolveStatus::FeasibleAtLimit => EXIT_TIMEOUT,
                SolveStatus::TimedOut => {
                    say!(c, "no incumbent found before the time limit");
                    EXIT_TIMEOUT
                }
            })
        }
    }
}

fn cmd_oracle(c: &mut Ctx, a: &OracleArgs) -> Result<u8> {
    let instance = a.instance.load()?;
    say!(c, "{}", c.header);
    let out = input(solve_bruteforce(&instance, a.robust))?;
    say!(c, "candidates evaluated: {}", out.evaluated);
    match &out.solution {
        Some(s) => {
            say!(c, "status: optimal");
            finish(c, &instance, s, a.out.as_deref())?;
            Ok(0)
        }
        None => {
            say!(c, "status: infeasible");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_simulate(c: &mut Ctx, a: &SimulateArgs) -> Result<u8> {
    let instance = a.instance.load()?;
    let solution = input(load_solution(&a.solution))?;
    let mut config = match &a.config {
        Some(p) => input(SimConfig::load(p))?,
        None => SimConfig::default(),
    };
    if let Some(v) = a.noise {
        config.epsilon = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.speed {
        config.nominal_speed = v;
    }
    if a.geometry {
        config.timing = ArcTiming::Geometry;
    }
    if a.no_vmm {
        config.vmm_enabled = false;
    }
    if a.stop_on_red {
        config.stop_on_red = true;
    }
    say!(c, "{}", c.header);
    let report = input(simulate(&instance, &solution, &config))?;
    put!(c, "{}", report.summary());
    if a.runs > 1 {
        let batch = input(simulate_batch(&instance, &solution, &config, a.runs))?;
        let feasible = batch.iter().filter(|r| r.is_feasible()).count();
        let objs: Vec<f64> = batch.iter().map(|r| r.objective).collect();
        let mean = objs.iter().sum::<f64>() / objs.len() as f64;
        let (lo, hi) = objs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &o| (a.0.min(o), a.1.max(o)));
        say!(c, "runs: {} feasible: {feasible} objective min/mean/max: {lo:.3} / {mean:.3} / {hi:.3}", a.runs);
    }
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("customers.csv"), report.customers_csv())?;
        fs::write(dir.join("arcs.csv"), report.arcs_csv())?;
        fs::write(dir.join("vibration.csv"), report.vibration_csv())?;
        fs::write(dir.join("events.csv"), report.events_csv())?;
        fs::write(dir.join("summary.txt"), format!("{}\n{}", c.header, report.summary()))?;
    }
    Ok(if report.is_feasible() { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_gen(c: &mut Ctx, a: &GenArgs) -> Result<u8> {
    let instance = if a.pentagon {
        input(field_test_pentagon(0.0).with_epsilon(a.epsilon))?
    } else {
        if a.n == 0 || a.vehicles == 0 {
            return Err(BadInput(anyhow!("n and vehicles must be positive")).into());
        }
        generate_random_with(a.n, a.vehicles, a.seed, &RandomConfig { epsilon: a.epsilon, ..RandomConfig::default() })
    };
    match &a.out {
        Some(p) => {
            save_instance(&instance, p).with_context(|| format!("writing {}", p.display()))?;
            say!(c, "{}", c.header);
            say!(c, "wrote {} (n={}, vehicles={})", p.display(), instance.n(), instance.num_vehicles());
        }
        None => say!(c, "{}", instance_to_string(&instance)),
    }
    Ok(0)
}

fn cmd_parse(c: &mut Ctx, a: &ParseArgs) -> Result<u8> {
    let overrides = Overrides { vehicles: a.vehicles, capacity: a.capacity, epsilon: a.epsilon };
    let instance = input(load_any(&a.input, &overrides))?;
    match &a.out {
        Some(p) => {
            save_instance(&instance, p).with_context(|| format!("writing {}", p.display()))?;
            say!(c, "{}", c.header);
            say!(
                c,
                "{}: n={} vehicles={} capacity={} epsilon={}",
                instance.name(),
                instance.n(),
                instance.num_vehicles(),
                instance.total_capacity(),
                instance.epsilon()
            );
        }
        None => say!(c, "{}", instance_to_string(&instance)),
    }
    Ok(0)
}

fn cmd_roughness(c: &mut Ctx, a: &RoughnessArgs) -> Result<u8> {
    let mut corridor_len = None;
    let cloud = match (&a.cloud, &a.profile) {
        (Some(p), _) => input(PointCloud::load(p))?,
        (None, Some(text)) => {
            let profile = RoughnessProfile::new(input(parse_segments(text, 0))?);
            corridor_len = Some(profile.length().ceil() as usize);
            input(synth_cloud(&profile, a.density, a.seed))?
        }
        (None, None) => return Err(BadInput(anyhow!("give --cloud or --profile")).into()),
    };
    let params = RansacParams { iterations: a.iterations, inlier_threshold: a.threshold, seed: a.seed };
    let fit = input(fit_plane_ransac(&cloud, &params))?;
    let grid = roughness_grid(&cloud, &fit.plane);
    say!(c, "{}", c.header);
    let n = fit.plane.normal;
    say!(c, "plane normal: ({:.6}, {:.6}, {:.6}) offset {:.6}", n.x, n.y, n.z, fit.plane.offset);
    say!(c, "inliers: {} of {}", fit.inliers.len(), cloud.len());
    let d = speed_factor(&grid, &Lookahead::default());
    let score = d.score.map_or("none".to_string(), |s| format!("{s:.4}"));
    say!(
        c,
        "lookahead: score {score} class {} beta {}{}",
        d.class,
        d.beta,
        if d.unknown_terrain { " (unknown terrain)" } else { "" }
    );
    if let Some(len) = corridor_len {
        let classes = grid.corridor_profile(len, Lookahead::default().half_width);
        let mut runs: Vec<(String, usize)> = Vec::new();
        for class in classes {
            match runs.last_mut() {
                Some((name, count)) if name == class.as_str() => *count += 1,
                _ => runs.push((class.as_str().to_string(), 1)),
            }
        }
        let text: Vec<String> = runs.iter().map(|(class, k)| format!("{k} m {class}")).collect();
        say!(c, "corridor: {}", text.join(", "));
    }
    match &a.out {
        Some(p) => fs::write(p, grid.to_csv()).with_context(|| format!("writing {}", p.display()))?,
        None => put!(c, "{}", grid.to_csv()),
    }
    Ok(0)
}

fn cmd_classify(c: &mut Ctx, a: &ClassifyArgs) -> Result<u8> {
    let mut params = ClassifierParams::default();
    if let Some(p) = a.proximity {
        params.proximity = p;
    }
    say!(c, "{}", c.header);
    let mut all_events = Vec::new();
    if a.scripted {
        let mut mismatches = 0;
        for s in scripted_interactions() {
            let out = input(run_scenario(&s.scenario, &params, &ConstantVelocity))?;
            let ok = out.phases == s.expected;
            mismatches += usize::from(!ok);
            say!(
                c,
                "{}: {} (expected {}) {}",
                s.name,
                sequence(&out.phases),
                sequence(&s.expected),
                if ok { "ok" } else { "MISMATCH" }
            );
            all_events.extend(out.events);
        }
        if mismatches > 0 {
            return Err(anyhow!("{mismatches} scripted interactions mismatched"));
        }
    } else if let Some(path) = &a.scenario {
        let text = input(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
        let scenario = input(Scenario::parse(&text))?;
        let out = input(run_scenario(&scenario, &params, &ConstantVelocity))?;
        for t in &out.tracks {
            let labels: Vec<_> = t.label_history.iter().map(|l| l.1).collect();
            say!(c, "track {}: {}", t.id, sequence(&labels));
        }
        say!(c, "phases: {}", sequence(&out.phases));
        all_events = out.events;
    }
    match &a.out {
        Some(p) => fs::write(p, events_csv(&all_events))?,
        None => put!(c, "{}", events_csv(&all_events)),
    }
    Ok(0)
}

fn cmd_bench(c: &mut Ctx, a: &BenchArgs) -> Result<u8> {
    let config = BenchConfig {
        n: a.n,
        fleet_sizes: a.fleet.clone(),
        instances_per_point: a.instances,
        seed: a.seed,
        time_limit: seconds(a.time_limit)?,
        epsilon: a.epsilon,
        heuristic_budget: a.budget,
        robust: !a.nominal,
    };
    fs::create_dir_all(&a.out_dir)?;
    let csv = a.out_dir.join("bench.csv");
    let records = bench::bench_fleet_sweep(&config, Some(&csv)).map_err(|e| match e {
        bench::BenchError::Io(_) => anyhow!(e),
        other => BadInput(anyhow!(other)).into(),
    })?;
    fs::write(a.out_dir.join("runtime.svg"), bench::runtime_svg(&records))?;
    fs::write(a.out_dir.join("objective.svg"), bench::objective_svg(&records))?;
    let summary = bench::summary_text(&records);
    fs::write(a.out_dir.join("summary.csv"), format!("{}\n{summary}", config.header()))?;
    say!(c, "{}", config.header());
    put!(c, "{summary}");
    let timeouts = records
        .iter()
        .filter(|r| {
            r.solver == SolverKind::Exact && matches!(r.status, SolveStatus::FeasibleAtLimit | SolveStatus::TimedOut)
        })
        .count();
    if timeouts > 0 {
        say!(c, "exact solves stopped at the time limit: {timeouts}");
    }
    Ok(0)
}

fn run(c: &mut Ctx, cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(c, a),
        Command::Oracle(a) => cmd_oracle(c, a),
        Command::Simulate(a) => cmd_simulate(c, a),
        Command::GenInstance(a) => cmd_gen(c, a),
        Command::Parse(a) => cmd_parse(c, a),
        Command::Roughness(a) => cmd_roughness(c, a),
        Command::Classify(a) => cmd_classify(c, a),
        Command::Bench(a) => cmd_bench(c, a),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let rendered = e.render();
            let _ =
                if e.use_stderr() { write!(err, "{}", rendered.ansi()) } else { write!(out, "{}", rendered.ansi()) };
            return code;
        }
    };
    let shown: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut ctx = Ctx { out, header: format!("# lastmile {} {}", env!("CARGO_PKG_VERSION"), shown.join(" ")) };
    let code = match run(&mut ctx, &cli) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", render(&e));
            if e.is::<BadInput>() {
                EXIT_INPUT
            } else {
                1
            }
        }
    };
    let _ = ctx.out.flush();
    code
}
