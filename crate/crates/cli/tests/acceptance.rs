//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Benchmark files for criterion 4 are read from `data/rc2/` at the workspace
//! root, or from the directory in `LASTMILE_RC2_DIR`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lastmile_core::instances::{
    generate_random_with, load_instance, load_solution, parse_benchmark, save_instance, save_solution, RandomConfig,
    SolomonOptions,
};
use lastmile_core::{
    build_model, evaluate_solution, monte_carlo_report, solve_bruteforce, solve_exact, solve_heuristic,
    worst_case_check, DurationRealization, ExactOptions, Instance, Point, Route, Solution, SolveStatus, TimeWindow,
};
use lastmile_perception::{
    beta_for_score, classify as classify_roughness, fit_plane_ransac, roughness_grid, synth_cloud, PointCloud,
    RansacParams, RoughnessClass, RoughnessProfile, Segment,
};
use lastmile_safety::{run_scenario, scripted_interactions, sequence, Class, ClassifierParams, ConstantVelocity};
use lastmile_sim::{simulate, ArcTiming, SimConfig};
use lastmile_toolkit::bench::{bench_fleet_sweep, median, BenchConfig, SolverKind};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn random(n: usize, k: usize, seed: u64, epsilon: f64) -> Instance {
    generate_random_with(n, k, seed, &RandomConfig { epsilon, ..RandomConfig::default() })
}

fn oracle_equivalence() -> Verdict {
    let mut mismatches = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let n = 3 + (i % 5) as usize;
        let k = 1 + (i % 3) as usize;
        let eps = [0.0, 1.0, 5.0][((i / 3) % 3) as usize];
        let robust = i % 2 == 0;
        let inst = random(n, k, 1000 + i, eps);
        let brute = solve_bruteforce(&inst, robust).expect("within oracle size");
        let exact = solve_exact(&build_model(&inst, robust), &ExactOptions::default()).expect("supported size");
        match (exact.status, exact.objective(), brute.objective()) {
            (SolveStatus::Optimal, Some(a), Some(b)) => {
                let gap = (a - b).abs();
                worst = worst.max(gap);
                if gap > 1e-6 {
                    mismatches.push(format!("#{i}: {a} vs {b}"));
                }
            }
            (status, a, b) => mismatches.push(format!("#{i}: {} {a:?} vs {b:?}", status.as_str())),
        }
    }
    verdict(mismatches.is_empty(), format!("100 instances, max gap {worst:.2e}, mismatches {mismatches:?}"))
}

fn robust_dominance() -> Verdict {
    let mut robust_feasible = 0;
    let mut violations = Vec::new();
    for i in 0..50u64 {
        let n = 5 + (i % 4) as usize;
        let k = 1 + (i % 3) as usize;
        let inst = random(n, k, 2000 + i, [1.0, 5.0][(i % 2) as usize]);
        let exact = solve_exact(&build_model(&inst, true), &ExactOptions::default());
        let Some(sol) = exact.ok().and_then(|o| o.solution) else {
            continue;
        };
        let wc = worst_case_check(&inst, &sol);
        if !wc.feasible {
            continue;
        }
        robust_feasible += 1;
        let mc = monte_carlo_report(&inst, &sol, 1000, 7 + i);
        let infeasible = mc.records.iter().filter(|r| !r.feasible).count();
        if infeasible > 0 || mc.max_objective > wc.objective + 1e-9 {
            violations.push(format!("#{i}: {infeasible} infeasible, max {} vs {}", mc.max_objective, wc.objective));
        }
    }
    verdict(
        robust_feasible == 50 && violations.is_empty(),
        format!("{robust_feasible}/50 robust-feasible, 1000 draws each, violations {violations:?}"),
    )
}

fn fleet_scaling() -> Verdict {
    let config = BenchConfig {
        n: 11,
        fleet_sizes: vec![2, 4, 6, 8, 10],
        instances_per_point: 10,
        seed: 0,
        time_limit: Duration::from_secs(120),
        ..BenchConfig::default()
    };
    let records = match bench_fleet_sweep(&config, None) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let med = |k: usize| {
        let mut t: Vec<f64> =
            records.iter().filter(|r| r.k == k && r.solver == SolverKind::Exact).map(|r| r.runtime_s).collect();
        median(&mut t)
    };
    let medians: Vec<String> = config.fleet_sizes.iter().map(|&k| format!("K={k}: {:.4}s", med(k))).collect();
    let unsolved = records.iter().filter(|r| r.solver == SolverKind::Exact && r.status != SolveStatus::Optimal).count();
    verdict(med(10) < med(2), format!("median exact runtime {}; {unsolved} not proven optimal", medians.join(", ")))
}

const RC2_NAMES: [&str; 5] = ["rc_204.3", "rc_207.4", "rc_205.1", "rc_203.1", "rc_202.1"];

fn rc2_dir() -> PathBuf {
    std::env::var_os("LASTMILE_RC2_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/rc2"))
}

fn find_rc2(dir: &Path, name: &str) -> Option<PathBuf> {
    let entries = fs::read_dir(dir).ok()?;
    entries.filter_map(|e| e.ok()).map(|e| e.path()).find(|p| {
        let file = p.file_name().map(|f| f.to_string_lossy().to_lowercase()).unwrap_or_default();
        file == name || file.starts_with(&format!("{name}."))
    })
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lastmile-acceptance-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn rc2_ingestion() -> Verdict {
    let dir = rc2_dir();
    let missing: Vec<&str> = RC2_NAMES.iter().copied().filter(|n| find_rc2(&dir, n).is_none()).collect();
    if !missing.is_empty() {
        return verdict(false, format!("benchmark files not found in {}: {}", dir.display(), missing.join(", ")));
    }
    let scratch = scratch_dir("rc2");
    let mut problems = Vec::new();
    let mut done = Vec::new();
    for name in RC2_NAMES {
        let path = find_rc2(&dir, name).expect("checked above");
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        let inst = match parse_benchmark(&text, &SolomonOptions::fleet(6, 10)) {
            Ok(i) => i,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        let sol = match solve_heuristic(&inst, false, 0, 40) {
            Ok(s) => s,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        let report = evaluate_solution(&inst, &sol, &DurationRealization::nominal(&inst));
        if !report.is_feasible() {
            problems.push(format!("{name}: {}", report.describe()));
        }
        let (ip, sp) = (scratch.join(format!("{name}.json")), scratch.join(format!("{name}.sol.json")));
        let round_trip = save_instance(&inst, &ip).is_ok()
            && save_solution(&sol, &sp).is_ok()
            && load_instance(&ip).ok().as_ref() == Some(&inst)
            && load_solution(&sp).ok().as_ref() == Some(&sol);
        if !round_trip {
            problems.push(format!("{name}: round trip differs"));
        }
        done.push(format!("{name} n={} obj={:.2}", inst.n(), sol.objective));
    }
    let _ = fs::remove_dir_all(&scratch);
    verdict(problems.is_empty(), format!("{}; problems {problems:?}", done.join(", ")))
}

/// Tilted ground with noise of ±1 cm and 20% of the points lifted 0.5-1 m.
fn outlier_ground(normal: Vector3<f64>, seed: u64) -> PointCloud {
    let n = normal.normalize();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 3]> = (0..2000)
        .map(|i| {
            let (x, y) = (rng.gen_range(0.0..10.0), rng.gen_range(-3.0..3.0));
            let ground = -(n.x * x + n.y * y) / n.z;
            let lift = if i < 400 { rng.gen_range(0.5..1.0) } else { rng.gen_range(-0.01..0.01) };
            [x, y, ground + lift]
        })
        .collect();
    PointCloud::from_xyz(&pts).expect("finite points")
}

fn vmm_geometry() -> Verdict {
    let truth = Vector3::new(0.08, -0.05, 1.0);
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let fit = fit_plane_ransac(&outlier_ground(truth, seed), &RansacParams { seed, ..RansacParams::default() });
        match fit {
            Ok(f) => worst = worst.max(f.plane.angle_to(&truth)),
            Err(e) => return verdict(false, format!("seed {seed}: {e}")),
        }
    }
    let probes = [
        (0.03, RoughnessClass::Smooth, 1.0),
        (0.10, RoughnessClass::Moderate, 0.75),
        (0.25, RoughnessClass::Rough, 0.5),
    ];
    let table_ok = probes.iter().all(|&(s, c, b)| classify_roughness(s) == c && beta_for_score(s) == b);
    verdict(
        worst < 1.0 && table_ok,
        format!(
            "max normal error {worst:.4} deg over 10 seeds; probes 0.03/0.10/0.25 -> beta {}/{}/{}",
            beta_for_score(0.03),
            beta_for_score(0.10),
            beta_for_score(0.25)
        ),
    )
}

fn traversal_replication() -> Verdict {
    let profile = RoughnessProfile::new(vec![Segment::new(36.0, 0.10), Segment::new(14.0, 0.0)]);
    let cloud = match synth_cloud(&profile, 200.0, 11) {
        Ok(c) => c,
        Err(e) => return verdict(false, e.to_string()),
    };
    let fit = match fit_plane_ransac(&cloud, &RansacParams::default()) {
        Ok(f) => f,
        Err(e) => return verdict(false, e.to_string()),
    };
    let grid = roughness_grid(&cloud, &fit.plane);
    let classes = grid.corridor_profile(50, 0.5);
    let moderate = classes.iter().filter(|c| **c == RoughnessClass::Moderate).count();
    let smooth = classes.iter().filter(|c| **c == RoughnessClass::Smooth).count();
    // One segment per meter carrying the measured cell score.
    let segments: Vec<Segment> = (0..50)
        .map(|m| Segment::new(1.0, grid.region_score(m as f64, m as f64 + 1.0, -0.5, 0.5).unwrap_or(f64::NAN)))
        .collect();

    let inst = Instance::builder(1)
        .euclidean(vec![Point::new(0.0, 0.0), Point::new(50.0, 0.0)])
        .build()
        .expect("valid instance");
    let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1])], &DurationRealization::nominal(&inst))
        .expect("valid route");
    let mut config = SimConfig { nominal_speed: 1.0, timing: ArcTiming::Geometry, ..SimConfig::default() };
    config.roughness.insert((0, 1), segments);
    let with_vmm = simulate(&inst, &sol, &config);
    config.vmm_enabled = false;
    let without = simulate(&inst, &sol, &config);
    let (Ok(on), Ok(off)) = (with_vmm, without) else {
        return verdict(false, "simulation failed");
    };
    let (t_on, t_off) = (on.arcs[0].time, off.arcs[0].time);
    let (v_on, v_off) = (on.vibration_summary(), off.vibration_summary());
    let peak_drop = 100.0 * (1.0 - v_on.peak / v_off.peak);
    let mean_drop = 100.0 * (1.0 - v_on.mean / v_off.mean);
    let pass = (moderate, smooth) == (36, 14)
        && (t_off - 50.0).abs() < 1e-9
        && (t_on - 62.0).abs() < 1e-9
        && (peak_drop - 40.0).abs() <= 10.0;
    verdict(
        pass,
        format!(
            "corridor {moderate} m moderate / {smooth} m smooth; traversal {t_off:.6} s -> {t_on:.6} s; vibration peak drop {peak_drop:.2}% (time-weighted mean drop {mean_drop:.2}%)"
        ),
    )
}

fn label_sequences() -> Verdict {
    let params = ClassifierParams::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for s in scripted_interactions() {
        let out = match run_scenario(&s.scenario, &params, &ConstantVelocity) {
            Ok(o) => o,
            Err(e) => return verdict(false, format!("{}: {e}", s.name)),
        };
        let phases_ok = out.phases == s.expected;
        // Events must sit exactly on entries into blue or red of each track.
        let mut expected = Vec::new();
        for t in &out.tracks {
            let mut prev: Option<Class> = None;
            for &(time, class) in &t.label_history {
                if class != Class::Green && prev != Some(class) {
                    expected.push((t.id, time, class));
                }
                prev = Some(class);
            }
        }
        let mut got: Vec<_> = out.events.iter().map(|e| (e.track_id, e.time, e.class)).collect();
        expected.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        got.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let events_ok = got == expected;
        pass &= phases_ok && events_ok;
        lines.push(format!("{} {}{}", s.name, sequence(&out.phases), if events_ok { "" } else { " (events differ)" }));
    }
    verdict(pass, lines.join(", "))
}

fn idle_semantics() -> Verdict {
    let inst = Instance::builder(2)
        .symmetric(0, 1, 5.0)
        .symmetric(1, 2, 3.0)
        .symmetric(0, 2, 100.0)
        .window(1, 20.0, 40.0)
        .window(2, 0.0, 40.0)
        .build()
        .expect("valid instance");
    let Some(sol) = solve_exact(&build_model(&inst, false), &ExactOptions::default()).ok().and_then(|o| o.solution)
    else {
        return verdict(false, "forced-wait instance not solved");
    };
    let starts: f64 = sol.latency.iter().sum();
    let forced_ok = sol.objective == 43.0 && starts == 43.0 && sol.idle[1] == 15.0;

    let mut increases = Vec::new();
    for i in 0..30u64 {
        let n = 3 + (i % 4) as usize;
        let inst = random(n, 1 + (i % 2) as usize, 3000 + i, 0.0);
        let tight =
            inst.map_windows(|_, w| TimeWindow::new(w.start + 40.0, (w.start + 40.0).max(w.end - 60.0).min(w.end)));
        let Ok(tight) = tight else { continue };
        let loose = match inst.map_windows(|_, w| TimeWindow::new((w.start - 20.0).max(0.0), w.end + 50.0)) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let opt = |x: &Instance| solve_bruteforce(x, false).ok().and_then(|b| b.objective());
        let (a, b, c) = (opt(&tight), opt(&inst), opt(&loose));
        let chain = [a, b, c];
        for w in chain.windows(2) {
            if let (Some(x), Some(y)) = (w[0], w[1]) {
                if y > x + 1e-9 {
                    increases.push(format!("#{i}: {x} -> {y}"));
                }
            } else if w[0].is_some() {
                increases.push(format!("#{i}: widening lost feasibility"));
            }
        }
    }
    verdict(
        forced_ok && increases.is_empty(),
        format!(
            "forced wait: objective {} = sum of starts {starts}, idle {}; widening increases {increases:?}",
            sol.objective, sol.idle[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("robust dominance", robust_dominance),
        ("fleet-size scaling", fleet_scaling),
        ("RC2 ingestion", rc2_ingestion),
        ("VMM geometry", vmm_geometry),
        ("traversal and vibration", traversal_replication),
        ("label sequences", label_sequences),
        ("idle-time semantics", idle_semantics),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let v = run();
        failed += usize::from(!v.pass);
        println!(
            "criterion {id} {name}: {} ({:.1}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
