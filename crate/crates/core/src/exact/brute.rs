//! Exhaustive enumeration of capacitated ordered assignments.
//!
//! Candidates are token strings over `{SEP} ∪ customers` with `m - 1`
//! separators, visited in lexicographic order (separator smallest). Keeping
//! only strict improvements therefore breaks ties towards the lexicographically
//! smallest encoding. Prefixes whose last stop already misses its window are
//! skipped; latencies only grow along a route so no completion could repair
//! them.

use super::ExactError;
use crate::model::{DurationRealization, DurationRegime, Instance, Route, Solution, FEASIBILITY_TOL};

pub const BRUTE_FORCE_MAX_CUSTOMERS: usize = 9;

#[derive(Debug, Clone)]
pub struct BruteForceOutcome {
    /// Optimal solution, `None` when no feasible assignment exists.
    pub solution: Option<Solution>,
    /// Number of complete candidates evaluated.
    pub evaluated: u64,
}

impl BruteForceOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

struct Enumerator<'a> {
    instance: &'a Instance,
    durations: DurationRealization,
    routes: Vec<Vec<usize>>,
    used: Vec<bool>,
    best: Option<(f64, Vec<Vec<usize>>)>,
    evaluated: u64,
}

impl Enumerator<'_> {
    fn recurse(&mut self, vehicle: usize, last: usize, clock: f64, sum: f64, placed: usize) {
        let n = self.instance.n();
        let m = self.instance.num_vehicles();
        if placed == n {
            self.evaluated += 1;
            if self.best.as_ref().map_or(true, |(b, _)| sum < b - 1e-9) {
                self.best = Some((sum, self.routes.clone()));
            }
            return;
        }
        if vehicle + 1 < m {
            self.recurse(vehicle + 1, 0, 0.0, sum, placed);
        }
        if self.routes[vehicle].len() >= self.instance.capacity(vehicle) as usize {
            return;
        }
        for j in 1..=n {
            if self.used[j] {
                continue;
            }
            let w = self.instance.window(j);
            let start = (clock + self.instance.service(last) + self.durations.get(last, j)).max(w.start);
            if start > w.end + FEASIBILITY_TOL {
                continue;
            }
            self.used[j] = true;
            self.routes[vehicle].push(j);
            self.recurse(vehicle, j, start, sum + start, placed + 1);
            self.routes[vehicle].pop();
            self.used[j] = false;
        }
    }
}

/// Minimum-objective feasible solution by full enumeration (`n <= 9`).
pub fn solve_bruteforce(instance: &Instance, robust: bool) -> Result<BruteForceOutcome, ExactError> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_CUSTOMERS {
        return Err(ExactError::TooLarge { n, max: BRUTE_FORCE_MAX_CUSTOMERS });
    }
    let durations = DurationRealization::for_regime(instance, DurationRegime::from_robust(robust));
    let m = instance.num_vehicles();
    let mut e = Enumerator {
        instance,
        durations,
        routes: vec![Vec::new(); m],
        used: vec![false; n + 1],
        best: None,
        evaluated: 0,
    };
    if m > 0 {
        e.recurse(0, 0, 0.0, 0.0, 0);
    } else if n == 0 {
        e.best = Some((0.0, Vec::new()));
    }
    let solution = e.best.take().map(|(_, routes)| {
        let routes = routes
            .into_iter()
            .enumerate()
            .filter(|(_, stops)| !stops.is_empty())
            .map(|(k, stops)| Route::new(k, stops))
            .collect();
        Solution::from_routes(instance, routes, &e.durations).expect("valid ids")
    });
    Ok(BruteForceOutcome { solution, evaluated: e.evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_large_instances() {
        let inst = Instance::builder(10).build().unwrap();
        assert_eq!(solve_bruteforce(&inst, false).unwrap_err(), ExactError::TooLarge { n: 10, max: 9 });
    }

    #[test]
    fn counts_all_labelled_orders() {
        // Two uncapacitated vehicles, three customers: 3! * C(4,1) = 24 candidates.
        let inst = Instance::builder(3).fleet(vec![3, 3]).build().unwrap();
        let out = solve_bruteforce(&inst, false).unwrap();
        assert_eq!(out.evaluated, 24);
    }

    #[test]
    fn ties_prefer_smallest_encoding() {
        // Zero durations: every assignment costs 0; the first candidate in
        // token order closes vehicle 0 immediately and serves 1, 2 on vehicle 1.
        let inst = Instance::builder(2).fleet(vec![2, 2]).build().unwrap();
        let out = solve_bruteforce(&inst, false).unwrap();
        assert_eq!(out.solution.unwrap().routes, vec![Route::new(1, vec![1, 2])]);
    }
}
