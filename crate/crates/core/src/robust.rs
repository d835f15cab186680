//! Worst-case evaluation and Monte-Carlo sampling over the box set
//! `𝒰 = {d >= 0 : |d - d̄| <= ε}`.
//!
//! Latencies are nondecreasing in every arc duration, so a solution that is
//! feasible at `d̄ + ε` stays feasible for every member of `𝒰`, and its
//! objective there is an upper bound on every sampled objective.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{evaluate_solution, DurationRealization, Instance, Solution, SolutionReport};

/// How perturbed duration matrices are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// Independent `U[-ε, ε]` per arc, clamped at zero.
    Uniform,
    /// Cycles through a fixed list of realizations.
    Scenarios(Vec<DurationRealization>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySampler {
    pub epsilon: f64,
    pub perturbation: Perturbation,
}

impl UncertaintySampler {
    pub fn uniform(epsilon: f64) -> Self {
        UncertaintySampler { epsilon, perturbation: Perturbation::Uniform }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::uniform(instance.epsilon())
    }

    /// Sample `index` of the run seeded by `seed`; each index uses its own
    /// ChaCha stream, so results do not depend on evaluation order.
    pub fn sample(&self, instance: &Instance, seed: u64, index: u64) -> DurationRealization {
        match &self.perturbation {
            Perturbation::Scenarios(list) if !list.is_empty() => list[(index % list.len() as u64) as usize].clone(),
            _ => {
                let size = instance.n() + 1;
                let eps = self.epsilon.min(instance.epsilon()).max(0.0);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index);
                let mut durations = vec![0.0; size * size];
                for i in 0..size {
                    for j in 0..size {
                        if i != j {
                            let delta = if eps > 0.0 { rng.gen_range(-eps..=eps) } else { 0.0 };
                            durations[i * size + j] = (instance.nominal(i, j) + delta).max(0.0);
                        }
                    }
                }
                DurationRealization::from_matrix(instance, durations).expect("sample lies in the box")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub feasible: bool,
    pub objective: f64,
    pub report: SolutionReport,
}

/// Evaluates `solution` with every arc at `d̄ + ε`.
pub fn worst_case_check(instance: &Instance, solution: &Solution) -> WorstCase {
    let report = evaluate_solution(instance, solution, &DurationRealization::worst_case(instance));
    WorstCase { feasible: report.is_feasible(), objective: report.objective, report }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub sample_id: u64,
    pub feasible: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub records: Vec<SampleRecord>,
    pub feasible_fraction: f64,
    pub min_objective: f64,
    pub mean_objective: f64,
    pub max_objective: f64,
}

impl MonteCarloReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,feasible,objective\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.sample_id, r.feasible, r.objective));
        }
        out
    }
}

pub fn monte_carlo_report(instance: &Instance, solution: &Solution, samples: usize, seed: u64) -> MonteCarloReport {
    monte_carlo_with(instance, solution, samples, seed, &UncertaintySampler::for_instance(instance))
}

pub fn monte_carlo_with(
    instance: &Instance,
    solution: &Solution,
    samples: usize,
    seed: u64,
    sampler: &UncertaintySampler,
) -> MonteCarloReport {
    let samples = samples.max(1);
    let records: Vec<SampleRecord> = (0..samples as u64)
        .into_par_iter()
        .map(|id| {
            let d = sampler.sample(instance, seed, id);
            let report = evaluate_solution(instance, solution, &d);
            SampleRecord { sample_id: id, feasible: report.is_feasible(), objective: report.objective }
        })
        .collect();
    let feasible = records.iter().filter(|r| r.feasible).count();
    let min_objective = records.iter().map(|r| r.objective).fold(f64::INFINITY, f64::min);
    let max_objective = records.iter().map(|r| r.objective).fold(f64::NEG_INFINITY, f64::max);
    let mean_objective = records.iter().map(|r| r.objective).sum::<f64>() / records.len() as f64;
    MonteCarloReport {
        feasible_fraction: feasible as f64 / records.len() as f64,
        records,
        min_objective,
        mean_objective,
        max_objective,
    }
}
