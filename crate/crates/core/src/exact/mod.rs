//! Exact solution of [`MilpModel`]s and the brute-force verification oracle.
//!
//! Two branch-and-bound engines share one result type:
//!
//! * [`NodeBound::Combinatorial`] (default) branches on arc variables in route
//!   order, fixing `x[k][last][j] = 1` to extend the open vehicle or
//!   `x[k][last][n+1] = 1` to close it, and bounds nodes with the latency
//!   bound described in [`search`]. Nodes are expanded best-bound first.
//! * [`NodeBound::LpRelaxation`] solves the LP relaxation of the model rows at
//!   every node and branches on the most fractional arc variable. Big-M rows
//!   make that bound weak, so this engine only suits very small models; it is
//!   kept because it reads the rows themselves and thereby cross-checks them.

mod brute;
mod lp;
mod search;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{DecodeError, MilpModel};
use crate::model::Solution;

pub use brute::{solve_bruteforce, BruteForceOutcome, BRUTE_FORCE_MAX_CUSTOMERS};
pub use lp::{lp_relaxation, LpRelaxation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Objective proven optimal.
    Optimal,
    /// Time limit reached with an incumbent; see `lower_bound`.
    FeasibleAtLimit,
    /// Search space exhausted without a feasible solution.
    Infeasible,
    /// Time limit reached before any feasible solution was found.
    TimedOut,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleAtLimit => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimedOut => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NodeBound {
    #[default]
    Combinatorial,
    LpRelaxation,
}

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub time_limit: Duration,
    pub node_bound: NodeBound,
    /// Known feasible solution used as the initial incumbent.
    pub warm_start: Option<Solution>,
    /// Beyond this many open nodes, popped nodes are explored depth-first.
    pub max_open_nodes: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            time_limit: Duration::from_secs(60),
            node_bound: NodeBound::Combinatorial,
            warm_start: None,
            max_open_nodes: 2_000_000,
        }
    }
}

impl ExactOptions {
    pub fn with_time_limit(time_limit: Duration) -> Self {
        ExactOptions { time_limit, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub status: SolveStatus,
    /// Best solution found, scheduled under the model's duration regime.
    pub solution: Option<Solution>,
    /// Proven lower bound on the optimum; equals the objective when optimal.
    pub lower_bound: f64,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl ExactOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("instance has {n} customers; the oracle enumerates at most {max}")]
    TooLarge { n: usize, max: usize },
    #[error("exact search supports at most {max} customers, got {n}")]
    Unsupported { n: usize, max: usize },
    #[error("integral LP point does not decode to routes: {0}")]
    Decode(#[from] DecodeError),
    #[error("LP relaxation is unbounded")]
    Unbounded,
}

/// Solves `model` to optimality or until `options.time_limit`.
pub fn solve_exact(model: &MilpModel, options: &ExactOptions) -> Result<ExactOutcome, ExactError> {
    match options.node_bound {
        NodeBound::Combinatorial => search::solve(model, options),
        NodeBound::LpRelaxation => lp::solve(model, options),
    }
}

/// Warm start check shared by both engines: the candidate must satisfy every
/// model row once its latencies are rescheduled under the model regime.
fn usable_warm_start(model: &MilpModel, warm: &Solution) -> Option<Solution> {
    let values = model.encode(&warm.routes);
    model.check(&values, 1e-6).ok()?;
    Solution::from_routes(model.instance(), warm.routes.clone(), &model.durations()).ok()
}
