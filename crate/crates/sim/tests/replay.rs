use lastmile_core::heuristic::solve_heuristic;
use lastmile_core::instances::{field_test_pentagon, generate_random_with, RandomConfig};
use lastmile_core::model::{evaluate_solution, DurationRealization, Route, Solution};
use lastmile_perception::Segment;
use lastmile_safety::scripted_interactions;
use lastmile_sim::*;
use proptest::prelude::*;

fn instance(n: usize, m: usize, seed: u64, eps: f64) -> lastmile_core::Instance {
    generate_random_with(n, m, seed, &RandomConfig { epsilon: eps, ..RandomConfig::default() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noiseless_replay_matches_evaluator(seed in 0u64..5000, n in 1usize..10, m in 1usize..4) {
        let inst = instance(n, m, seed, 0.0);
        let sol = solve_heuristic(&inst, false, seed, 20).unwrap();
        let report = simulate(&inst, &sol, &SimConfig::default()).unwrap();
        let eval = evaluate_solution(&inst, &sol, &DurationRealization::nominal(&inst));
        prop_assert_eq!(&report.latency, &eval.latency);
        prop_assert_eq!(&report.idle, &eval.idle);
        prop_assert_eq!(report.objective, eval.objective);
        prop_assert!(report.is_feasible());
    }

    #[test]
    fn perturbations_stay_in_band(seed in 0u64..5000, n in 1usize..10, eps in 0.0f64..8.0) {
        let inst = instance(n, 2, seed, eps);
        let sol = solve_heuristic(&inst, true, seed, 20).unwrap();
        let cfg = SimConfig { epsilon: eps, seed, ..SimConfig::default() };
        let report = simulate(&inst, &sol, &cfg).unwrap();
        for a in &report.arcs {
            prop_assert!((a.time - a.base).abs() <= eps + 1e-9);
            prop_assert!(a.time >= 0.0);
        }
        // Robust plans stay on time for every draw inside the band.
        prop_assert!(report.window_violations.is_empty());
        prop_assert!((report.objective - report.latency.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn vmm_reduces_vibration(len_a in 1.0f64..40.0, len_b in 1.0f64..40.0, r in 0.05f64..0.5, speed in 0.3f64..2.0) {
        let inst = lastmile_core::Instance::builder(1).symmetric(0, 1, (len_a + len_b) / speed).build().unwrap();
        let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1])], &DurationRealization::nominal(&inst)).unwrap();
        let mut cfg = SimConfig::default();
        cfg.roughness.insert((0, 1), vec![Segment::new(len_a, r), Segment::new(len_b, 0.0)]);
        let on = simulate(&inst, &sol, &cfg).unwrap().vibration_summary();
        cfg.vmm_enabled = false;
        let off = simulate(&inst, &sol, &cfg).unwrap().vibration_summary();
        prop_assert!(on.integral < off.integral);
        prop_assert!(on.peak < off.peak);
    }

    #[test]
    fn idle_padding_leaves_objective(seed in 0u64..5000, n in 1usize..8) {
        let inst = instance(n, 2, seed, 0.0);
        let sol = solve_heuristic(&inst, false, seed, 20).unwrap();
        let base = simulate(&inst, &sol, &SimConfig::default()).unwrap();
        // Open every window exactly at the realized start: arrivals that were
        // early now wait up to it, late-opening ones are unchanged.
        let padded = inst.map_windows(|c, w| lastmile_core::TimeWindow::new(base.latency[c].min(w.end), w.end)).unwrap();
        let again = simulate(&padded, &sol, &SimConfig::default()).unwrap();
        prop_assert_eq!(again.objective, base.objective);
        prop_assert_eq!(again.latency, base.latency);
    }
}

#[test]
fn nominal_estimation() {
    let inst = field_test_pentagon(0.0);
    let quiet = estimate_nominals(&inst, &SimConfig::default(), 10).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert!((quiet[i][j] - inst.nominal(i, j)).abs() < 1e-9);
        }
    }
    let noisy = SimConfig { epsilon: 5.0, seed: 3, ..SimConfig::default() };
    let one = estimate_nominals(&inst, &noisy, 1).unwrap();
    assert!(one.iter().flatten().zip(quiet.iter().flatten()).any(|(a, b)| a != b));
    // Mean of 400 uniform draws on ±5 s: standard error 5/sqrt(1200) ≈ 0.144 s.
    let many = estimate_nominals(&inst, &noisy, 400).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert!((many[i][j] - many[j][i]).abs() < 6.0 * 0.144 * 2f64.sqrt(), "{i}-{j}");
        }
    }
}

#[test]
fn field_pentagon_stays_in_five_second_band() {
    let inst = field_test_pentagon(5.0);
    let sol = solve_heuristic(&inst, true, 0, 20).unwrap();
    let reports = simulate_batch(&inst, &sol, &SimConfig { epsilon: 5.0, ..SimConfig::default() }, 50).unwrap();
    for r in &reports {
        assert!(r.arcs.iter().all(|a| (a.time - a.base).abs() <= 5.0));
    }
}

#[test]
fn pedestrian_encounter_logs_and_stops() {
    let inst = lastmile_core::Instance::builder(1).symmetric(0, 1, 30.0).build().unwrap();
    let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1])], &DurationRealization::nominal(&inst)).unwrap();
    let case = scripted_interactions().into_iter().find(|c| c.name == "stops-in-lane").unwrap();
    let mut cfg = SimConfig::default();
    cfg.pedestrians.insert((0, 1), case.scenario);
    let plain = simulate(&inst, &sol, &cfg).unwrap();
    assert_eq!(plain.arcs[0].time, 30.0);
    assert!(plain.vocal_log.iter().any(|e| e.class == lastmile_safety::Class::Red));
    cfg.stop_on_red = true;
    let stopped = simulate(&inst, &sol, &cfg).unwrap();
    assert!(stopped.arcs[0].red_delay > 0.0);
    assert!(stopped.arcs[0].time > 30.0);
    assert!(stopped.events_csv().starts_with("time,track_id,class,event\n"));
}
