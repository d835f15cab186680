//! LP relaxation of the model rows and the LP-bounded branch and bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::{usable_warm_start, ExactError, ExactOptions, ExactOutcome, SolveStatus};
use crate::milp::{MilpModel, Sense};
use crate::model::Solution;

const INTEGRALITY_TOL: f64 = 1e-6;

/// Optimal value and point of the continuous relaxation.
#[derive(Debug, Clone)]
pub struct LpRelaxation {
    pub objective: f64,
    pub values: Vec<f64>,
}

fn to_problem(model: &MilpModel) -> (Problem, Vec<minilp::Variable>) {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = model.variables().iter().map(|v| problem.add_var(v.objective, (v.lower, v.upper))).collect();
    for row in model.rows() {
        if row.terms.is_empty() {
            continue;
        }
        let expr: Vec<(minilp::Variable, f64)> = row.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Eq => ComparisonOp::Eq,
            Sense::Ge => ComparisonOp::Ge,
        };
        problem.add_constraint(expr.as_slice(), op, row.rhs);
    }
    (problem, vars)
}

/// Solves the relaxation with integrality dropped. `Ok(None)` means the
/// relaxation (and hence the model) is infeasible.
pub fn lp_relaxation(model: &MilpModel) -> Result<Option<LpRelaxation>, ExactError> {
    let (problem, vars) = to_problem(model);
    match problem.solve() {
        Ok(sol) => Ok(Some(LpRelaxation {
            objective: sol.objective(),
            values: vars.iter().map(|&v| *sol.var_value(v)).collect(),
        })),
        Err(minilp::Error::Infeasible) => Ok(None),
        Err(minilp::Error::Unbounded) => Err(ExactError::Unbounded),
    }
}

struct LpNode {
    bound: f64,
    seq: u64,
    lp: minilp::Solution,
}

impl PartialEq for LpNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for LpNode {}
impl PartialOrd for LpNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LpNode {
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Most fractional binary, ties broken by the smallest column, i.e. the
/// smallest `(k, i, j)`.
fn branching_var(model: &MilpModel, values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, v) in model.variables().iter().enumerate() {
        if !v.integer {
            continue;
        }
        let frac = values[idx] - values[idx].floor();
        let dist = frac.min(1.0 - frac);
        if dist <= INTEGRALITY_TOL {
            continue;
        }
        if best.map_or(true, |(_, d)| dist > d + 1e-12) {
            best = Some((idx, dist));
        }
    }
    best.map(|(idx, _)| idx)
}

pub(super) fn solve(model: &MilpModel, options: &ExactOptions) -> Result<ExactOutcome, ExactError> {
    let started = Instant::now();
    let deadline = started + options.time_limit;
    let (problem, vars) = to_problem(model);
    let mut incumbent: Option<Solution> = options.warm_start.as_ref().and_then(|w| usable_warm_start(model, w));
    let mut nodes = 0u64;
    let mut seq = 0u64;
    let mut stopped_at: Option<f64> = None;

    let root = match problem.solve() {
        Ok(lp) => Some(lp),
        Err(minilp::Error::Infeasible) => None,
        Err(minilp::Error::Unbounded) => return Err(ExactError::Unbounded),
    };
    let mut heap = BinaryHeap::new();
    if let Some(lp) = root {
        heap.push(LpNode { bound: lp.objective(), seq, lp });
    }
    while let Some(node) = heap.pop() {
        let cutoff = incumbent.as_ref().map_or(f64::INFINITY, |s| s.objective);
        if node.bound >= cutoff - 1e-9 {
            heap.clear();
            break;
        }
        nodes += 1;
        if Instant::now() >= deadline {
            stopped_at = Some(node.bound);
            break;
        }
        let values: Vec<f64> = vars.iter().map(|&v| *node.lp.var_value(v)).collect();
        match branching_var(model, &values) {
            None => {
                let mut rounded = values;
                for (idx, v) in model.variables().iter().enumerate() {
                    if v.integer {
                        rounded[idx] = rounded[idx].round();
                    }
                }
                let sol = model.decode_solution(&rounded)?;
                if sol.objective < cutoff - 1e-9 {
                    incumbent = Some(sol);
                }
            }
            Some(var) => {
                for val in [0.0, 1.0] {
                    if let Ok(child) = node.lp.clone().fix_var(vars[var], val) {
                        seq += 1;
                        heap.push(LpNode { bound: child.objective(), seq, lp: child });
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    if let Some(sol) = incumbent.as_mut() {
        sol.canonicalize();
    }
    let (status, lower_bound) = match (&incumbent, stopped_at) {
        (Some(sol), None) => (SolveStatus::Optimal, sol.objective),
        (Some(sol), Some(lb)) => (SolveStatus::FeasibleAtLimit, lb.min(sol.objective)),
        (None, None) => (SolveStatus::Infeasible, f64::INFINITY),
        (None, Some(lb)) => (SolveStatus::TimedOut, lb),
    };
    Ok(ExactOutcome { status, solution: incumbent, lower_bound, nodes, elapsed })
}
