//! Cheapest-latency insertion followed by local search.
//!
//! Each restart inserts the customers one at a time (the first restart in
//! order of window end, the others in a seeded shuffle) at the position that
//! increases `Σ l_i` least, then applies relocate, inter-route swap and
//! intra-route 2-opt moves, accepting only strict improvements. Moves are
//! evaluated by rescheduling the affected routes from scratch: a change early
//! in a route shifts every later latency.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{DurationRealization, DurationRegime, Instance, Route, Solution, FEASIBILITY_TOL};

const IMPROVEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeuristicError {
    #[error("fleet capacity {capacity} is smaller than the {customers} customers")]
    CapacityShortfall { customers: usize, capacity: u64 },
    #[error("no feasible insertion for customer {customer}; {} customers were placed", partial.served())]
    NoFeasibleInsertion { customer: usize, partial: Box<Solution> },
}

/// Outcome of a heuristic run with its improvement trace.
#[derive(Debug, Clone)]
pub struct HeuristicRun {
    pub solution: Solution,
    /// Objective of the insertion solution of the winning restart.
    pub initial_objective: f64,
    /// Objective after every accepted move of the winning restart.
    pub trace: Vec<f64>,
    pub restarts: usize,
}

pub fn solve_heuristic(
    instance: &Instance,
    robust: bool,
    seed: u64,
    iteration_budget: usize,
) -> Result<Solution, HeuristicError> {
    solve_heuristic_detailed(instance, robust, seed, iteration_budget).map(|r| r.solution)
}

pub fn solve_heuristic_detailed(
    instance: &Instance,
    robust: bool,
    seed: u64,
    iteration_budget: usize,
) -> Result<HeuristicRun, HeuristicError> {
    let capacity = instance.total_capacity();
    if capacity < instance.n() as u64 {
        return Err(HeuristicError::CapacityShortfall { customers: instance.n(), capacity });
    }
    let durations = DurationRealization::for_regime(instance, DurationRegime::from_robust(robust));
    let restarts = (iteration_budget / 10).max(1);
    let runs: Vec<Result<Restart, (usize, Vec<Vec<usize>>)>> =
        (0..restarts).into_par_iter().map(|r| Planner::new(instance, &durations).restart(seed, r)).collect();

    let mut best: Option<Restart> = None;
    let mut first_failure = None;
    for run in runs {
        match run {
            Ok(r) => {
                if best.as_ref().map_or(true, |b| r.objective < b.objective - IMPROVEMENT_TOL) {
                    best = Some(r);
                }
            }
            Err(f) => {
                first_failure.get_or_insert(f);
            }
        }
    }
    match best {
        Some(r) => {
            let routes = to_routes(&r.routes);
            let mut solution = Solution::from_routes(instance, routes, &durations).expect("valid ids");
            solution.canonicalize();
            Ok(HeuristicRun { solution, initial_objective: r.initial, trace: r.trace, restarts })
        }
        None => {
            let (customer, partial) = first_failure.expect("at least one restart ran");
            let partial = Solution::from_routes(instance, to_routes(&partial), &durations).expect("valid ids");
            Err(HeuristicError::NoFeasibleInsertion { customer, partial: Box::new(partial) })
        }
    }
}

fn to_routes(routes: &[Vec<usize>]) -> Vec<Route> {
    routes.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(k, s)| Route::new(k, s.clone())).collect()
}

struct Restart {
    routes: Vec<Vec<usize>>,
    objective: f64,
    initial: f64,
    trace: Vec<f64>,
}

struct Planner<'a> {
    instance: &'a Instance,
    durations: &'a DurationRealization,
}

impl<'a> Planner<'a> {
    fn new(instance: &'a Instance, durations: &'a DurationRealization) -> Self {
        Planner { instance, durations }
    }

    /// `Σ l_i` of a route, `None` if it misses a window or exceeds capacity.
    fn cost(&self, vehicle: usize, stops: &[usize]) -> Option<f64> {
        if stops.len() > self.instance.capacity(vehicle) as usize {
            return None;
        }
        let mut prev = 0;
        let mut clock = 0.0f64;
        let mut sum = 0.0;
        for &s in stops {
            let w = self.instance.window(s);
            clock = (clock + self.instance.service(prev) + self.durations.get(prev, s)).max(w.start);
            if clock > w.end + FEASIBILITY_TOL {
                return None;
            }
            sum += clock;
            prev = s;
        }
        Some(sum)
    }

    fn restart(&self, seed: u64, index: usize) -> Result<Restart, (usize, Vec<Vec<usize>>)> {
        let mut order: Vec<usize> = self.instance.customers().collect();
        if index == 0 {
            order.sort_by(|&a, &b| {
                let (wa, wb) = (self.instance.window(a), self.instance.window(b));
                wa.end.total_cmp(&wb.end).then(wa.start.total_cmp(&wb.start)).then(a.cmp(&b))
            });
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            order.shuffle(&mut rng);
        }
        let mut routes = self.insert_all(&order)?;
        let mut costs: Vec<f64> =
            routes.iter().enumerate().map(|(k, r)| self.cost(k, r).expect("insertion keeps routes feasible")).collect();
        let initial: f64 = costs.iter().sum();
        let mut trace = Vec::new();
        self.local_search(&mut routes, &mut costs, &mut trace);
        Ok(Restart { objective: costs.iter().sum(), routes, initial, trace })
    }

    fn insert_all(&self, order: &[usize]) -> Result<Vec<Vec<usize>>, (usize, Vec<Vec<usize>>)> {
        let m = self.instance.num_vehicles();
        let mut routes: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut costs = vec![0.0; m];
        let mut candidate = Vec::new();
        for &c in order {
            let mut best: Option<(f64, usize, usize, f64)> = None;
            for k in 0..m {
                for pos in 0..=routes[k].len() {
                    candidate.clear();
                    candidate.extend_from_slice(&routes[k][..pos]);
                    candidate.push(c);
                    candidate.extend_from_slice(&routes[k][pos..]);
                    if let Some(cost) = self.cost(k, &candidate) {
                        let delta = cost - costs[k];
                        if best.map_or(true, |(d, ..)| delta < d - IMPROVEMENT_TOL) {
                            best = Some((delta, k, pos, cost));
                        }
                    }
                }
            }
            match best {
                Some((_, k, pos, cost)) => {
                    routes[k].insert(pos, c);
                    costs[k] = cost;
                }
                None => return Err((c, routes)),
            }
        }
        Ok(routes)
    }

    fn local_search(&self, routes: &mut [Vec<usize>], costs: &mut [f64], trace: &mut Vec<f64>) {
        loop {
            let improved = self.relocate(routes, costs) || self.swap(routes, costs) || self.two_opt(routes, costs);
            if !improved {
                break;
            }
            trace.push(costs.iter().sum());
        }
    }

    /// Moves one customer to another position, possibly in another route.
    fn relocate(&self, routes: &mut [Vec<usize>], costs: &mut [f64]) -> bool {
        let m = routes.len();
        for from in 0..m {
            for p in 0..routes[from].len() {
                let c = routes[from][p];
                let mut source = routes[from].clone();
                source.remove(p);
                let Some(source_cost) = self.cost(from, &source) else { continue };
                for to in 0..m {
                    let base: &[usize] = if to == from { &source } else { &routes[to] };
                    for q in 0..=base.len() {
                        if to == from && q == p {
                            continue;
                        }
                        let mut target = base.to_vec();
                        target.insert(q, c);
                        let Some(target_cost) = self.cost(to, &target) else { continue };
                        let delta = if to == from {
                            target_cost - costs[from]
                        } else {
                            source_cost + target_cost - costs[from] - costs[to]
                        };
                        if delta < -IMPROVEMENT_TOL {
                            if to == from {
                                routes[from] = target;
                                costs[from] = target_cost;
                            } else {
                                routes[from] = source;
                                costs[from] = source_cost;
                                routes[to] = target;
                                costs[to] = target_cost;
                            }
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Exchanges two customers of different routes in place.
    fn swap(&self, routes: &mut [Vec<usize>], costs: &mut [f64]) -> bool {
        let m = routes.len();
        for a in 0..m {
            for b in a + 1..m {
                for p in 0..routes[a].len() {
                    for q in 0..routes[b].len() {
                        let mut ra = routes[a].clone();
                        let mut rb = routes[b].clone();
                        std::mem::swap(&mut ra[p], &mut rb[q]);
                        let (Some(ca), Some(cb)) = (self.cost(a, &ra), self.cost(b, &rb)) else {
                            continue;
                        };
                        if ca + cb - costs[a] - costs[b] < -IMPROVEMENT_TOL {
                            routes[a] = ra;
                            routes[b] = rb;
                            costs[a] = ca;
                            costs[b] = cb;
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Reverses a segment within one route.
    fn two_opt(&self, routes: &mut [Vec<usize>], costs: &mut [f64]) -> bool {
        for k in 0..routes.len() {
            let len = routes[k].len();
            for i in 0..len {
                for j in i + 1..len {
                    let mut r = routes[k].clone();
                    r[i..=j].reverse();
                    if let Some(c) = self.cost(k, &r) {
                        if c - costs[k] < -IMPROVEMENT_TOL {
                            routes[k] = r;
                            costs[k] = c;
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate_solution;

    #[test]
    fn capacity_shortfall_rejected() {
        let inst = Instance::builder(3).fleet(vec![1, 1]).build().unwrap();
        assert!(matches!(
            solve_heuristic(&inst, false, 1, 10),
            Err(HeuristicError::CapacityShortfall { customers: 3, capacity: 2 })
        ));
    }

    #[test]
    fn unreachable_window_reports_partial_state() {
        let inst = Instance::builder(2)
            .symmetric(0, 1, 5.0)
            .symmetric(0, 2, 50.0)
            .symmetric(1, 2, 50.0)
            .window(2, 0.0, 10.0)
            .build()
            .unwrap();
        match solve_heuristic(&inst, false, 3, 20) {
            Err(HeuristicError::NoFeasibleInsertion { customer, partial }) => {
                assert_eq!(customer, 2);
                assert!(partial.served() <= 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_stop_line_finds_nearest_first() {
        let inst = Instance::builder(2).symmetric(0, 1, 1.0).symmetric(0, 2, 2.0).symmetric(1, 2, 1.0).build().unwrap();
        let sol = solve_heuristic(&inst, false, 0, 10).unwrap();
        assert_eq!(sol.routes, vec![Route::new(0, vec![1, 2])]);
        assert_eq!(sol.objective, 3.0);
    }

    #[test]
    fn robust_solution_is_worst_case_feasible() {
        let inst = Instance::builder(3)
            .symmetric(0, 1, 4.0)
            .symmetric(0, 2, 6.0)
            .symmetric(0, 3, 5.0)
            .symmetric(1, 2, 3.0)
            .symmetric(1, 3, 6.0)
            .symmetric(2, 3, 2.0)
            .window(3, 0.0, 14.0)
            .epsilon(2.0)
            .fleet(vec![2, 2])
            .build()
            .unwrap();
        let sol = solve_heuristic(&inst, true, 9, 30).unwrap();
        let report = evaluate_solution(&inst, &sol, &DurationRealization::worst_case(&inst));
        assert!(report.is_feasible(), "{}", report.describe());
    }
}
