//! Robust cumulative capacitated vehicle routing with time windows.
//!
//! Customers `1..=n` are served by capacitated vehicles leaving depot `0` at
//! time zero; the objective is the sum of service-start times. Travel times
//! are uncertain inside a box of half-width `ε` around their nominal values.
//!
//! - [`model`]: instances, solutions and the earliest-start evaluator.
//! - [`milp`]: the mixed-integer formulation with LP export.
//! - [`exact`]: branch and bound plus a brute-force oracle.
//! - [`heuristic`]: insertion and local search.
//! - [`instances`]: benchmark parsing, generation and persistence.
//! - [`robust`]: worst-case checks and Monte-Carlo sampling.

pub mod error;
pub mod exact;
pub mod heuristic;
pub mod instances;
pub mod milp;
pub mod model;
pub mod robust;

pub use error::ModelError;
pub use exact::{solve_bruteforce, solve_exact, ExactOptions, ExactOutcome, SolveStatus};
pub use heuristic::{solve_heuristic, HeuristicError};
pub use milp::{build_model, MilpModel};
pub use model::{
    evaluate_route, evaluate_solution, DurationRealization, DurationRegime, Instance, Point, Route, Solution,
    SolutionReport, TimeWindow,
};
pub use robust::{monte_carlo_report, worst_case_check, UncertaintySampler};
