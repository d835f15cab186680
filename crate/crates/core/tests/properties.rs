use lastmile_core::exact::ExactOptions;
use lastmile_core::heuristic::solve_heuristic;
use lastmile_core::instances::{generate_random_with, instance_from_str, instance_to_string, RandomConfig};
use lastmile_core::robust::{monte_carlo_report, worst_case_check, UncertaintySampler};
use lastmile_core::*;
use proptest::prelude::*;

fn instance(n: usize, m: usize, seed: u64, eps: f64) -> Instance {
    generate_random_with(n, m, seed, &RandomConfig { epsilon: eps, ..RandomConfig::default() })
}

fn optimum(inst: &Instance, robust: bool) -> Option<f64> {
    solve_exact(&build_model(inst, robust), &ExactOptions::default()).unwrap().objective()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schedule_is_earliest_start(seed in 0u64..10_000, n in 1usize..9) {
        let inst = instance(n, 1, seed, 0.0);
        let stops: Vec<usize> = inst.customers().collect();
        let d = DurationRealization::nominal(&inst);
        let e = evaluate_route(&inst, &Route::new(0, stops.clone()), &d).unwrap();
        let mut prev = 0;
        let mut clock = 0.0;
        for (pos, &c) in stops.iter().enumerate() {
            let expected = (clock + inst.service(prev) + d.get(prev, c)).max(inst.window(c).start);
            prop_assert_eq!(e.latency[pos], expected);
            prop_assert!(e.idle[pos] >= 0.0);
            clock = expected;
            prev = c;
        }
        prop_assert!((e.objective - e.latency.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn latencies_monotone_in_durations(seed in 0u64..10_000, n in 1usize..9, eps in 0.0f64..8.0) {
        let inst = instance(n, 1, seed, eps);
        let route = Route::new(0, inst.customers().rev().collect());
        let lo = evaluate_route(&inst, &route, &DurationRealization::best_case(&inst)).unwrap();
        let mid = evaluate_route(&inst, &route, &DurationRealization::nominal(&inst)).unwrap();
        let hi = evaluate_route(&inst, &route, &DurationRealization::worst_case(&inst)).unwrap();
        for i in 0..route.stops.len() {
            prop_assert!(lo.latency[i] <= mid.latency[i] + 1e-9);
            prop_assert!(mid.latency[i] <= hi.latency[i] + 1e-9);
        }
    }

    #[test]
    fn objective_additive_over_routes(seed in 0u64..10_000, n in 2usize..9) {
        let inst = instance(n, 2, seed, 0.0);
        let sol = solve_heuristic(&inst, false, seed, 20).unwrap();
        let report = evaluate_solution(&inst, &sol, &DurationRealization::nominal(&inst));
        prop_assert!((report.objective - report.route_objectives.iter().sum::<f64>()).abs() < 1e-9);
        prop_assert!((report.objective - sol.objective).abs() < 1e-9);
    }

    #[test]
    fn robust_optimum_dominates_nominal(seed in 0u64..10_000, n in 1usize..7, m in 1usize..4) {
        let inst = instance(n, m, seed, 3.0);
        let nominal = optimum(&inst, false).expect("generated instances are feasible");
        let robust = optimum(&inst, true).expect("generated instances are robust-feasible");
        prop_assert!(robust >= nominal - 1e-9);
    }

    #[test]
    fn heuristic_is_deterministic_feasible_and_above_optimum(seed in 0u64..10_000, n in 1usize..8, m in 1usize..4) {
        let inst = instance(n, m, seed, 1.0);
        let a = solve_heuristic(&inst, true, seed, 30).unwrap();
        let b = solve_heuristic(&inst, true, seed, 30).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(worst_case_check(&inst, &a).feasible);
        prop_assert!(a.objective >= optimum(&inst, true).unwrap() - 1e-6);
    }

    #[test]
    fn widening_windows_never_hurts(seed in 0u64..10_000, n in 1usize..7, slack in 0.0f64..50.0) {
        let inst = instance(n, 2, seed, 0.0);
        let wider = inst.map_windows(|_, w| TimeWindow::new((w.start - slack).max(0.0), w.end + slack)).unwrap();
        prop_assert!(optimum(&wider, false).unwrap() <= optimum(&inst, false).unwrap() + 1e-9);
    }

    #[test]
    fn samples_stay_in_box(seed in 0u64..10_000, n in 1usize..7, eps in 0.0f64..10.0, idx in 0u64..1000) {
        let inst = instance(n, 1, seed, eps);
        let d = UncertaintySampler::for_instance(&inst).sample(&inst, seed, idx);
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    prop_assert!(d.get(i, j) >= 0.0);
                    prop_assert!((d.get(i, j) - inst.nominal(i, j)).abs() <= eps + 1e-9);
                }
            }
        }
    }

    #[test]
    fn sampled_objectives_within_envelope(seed in 0u64..10_000, n in 1usize..7) {
        let inst = instance(n, 2, seed, 5.0);
        let sol = solve_heuristic(&inst, true, seed, 20).unwrap();
        let wc = worst_case_check(&inst, &sol);
        let best = evaluate_solution(&inst, &sol, &DurationRealization::best_case(&inst));
        let mc = monte_carlo_report(&inst, &sol, 64, seed);
        prop_assert!(wc.feasible);
        prop_assert_eq!(mc.feasible_fraction, 1.0);
        prop_assert!(mc.max_objective <= wc.objective + 1e-9);
        prop_assert!(mc.min_objective >= best.objective - 1e-9);
    }

    #[test]
    fn euclidean_durations_obey_triangle_inequality(seed in 0u64..10_000, n in 2usize..10) {
        let inst = instance(n, 1, seed, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    prop_assert!(inst.nominal(i, k) <= inst.nominal(i, j) + inst.nominal(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn native_round_trip(seed in 0u64..10_000, n in 0usize..12, eps in 0.0f64..10.0) {
        let inst = instance(n.max(1), 3, seed, eps);
        prop_assert_eq!(instance_from_str(&instance_to_string(&inst)).unwrap(), inst);
    }

    #[test]
    fn generator_is_seed_deterministic(seed in 0u64..10_000, n in 1usize..12, m in 1usize..6) {
        let a = instance(n, m, seed, 2.0);
        let b = instance(n, m, seed, 2.0);
        prop_assert_eq!(instance_to_string(&a), instance_to_string(&b));
        prop_assert!(a.fleet().iter().all(|&c| c as usize == (2 * n).div_ceil(m)));
    }
}
