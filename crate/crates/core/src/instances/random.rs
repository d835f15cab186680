//! Seeded random instances for fleet-size studies.
//!
//! Customers are uniform on a `side x side` square with the depot at its
//! centre; durations are Euclidean (one meter per second). Each window opens
//! at `max(0, d̄(0,i) + offset)` with `offset ~ U(offset_min, offset_max)` and
//! stays open for `width ~ U(width_min, width_max)` seconds past the later of
//! its opening and the worst-case direct arrival `d̄(0,i) + ε`. Instances that
//! the heuristic cannot route under `d̄ + ε` are redrawn with widths scaled up
//! by `1 + attempt / 4`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::heuristic::solve_heuristic;
use crate::model::{Instance, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomConfig {
    pub side: f64,
    pub epsilon: f64,
    pub offset_min: f64,
    pub offset_max: f64,
    pub width_min: f64,
    pub width_max: f64,
    /// Heuristic iteration budget used for the feasibility screen.
    pub screen_budget: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            side: 100.0,
            epsilon: 0.0,
            offset_min: -40.0,
            offset_max: 120.0,
            width_min: 150.0,
            width_max: 300.0,
            screen_budget: 40,
        }
    }
}

/// `c_k = ⌈2n / |K|⌉`.
pub fn fleet_capacity(n: usize, num_vehicles: usize) -> u32 {
    (2 * n).div_ceil(num_vehicles.max(1)) as u32
}

pub fn generate_random(n: usize, num_vehicles: usize, seed: u64) -> Instance {
    generate_random_with(n, num_vehicles, seed, &RandomConfig::default())
}

/// Geometry depends only on `seed` and `n`, so sweeping `num_vehicles` with a
/// fixed seed varies the fleet over the same customers.
pub fn generate_random_with(n: usize, num_vehicles: usize, seed: u64, config: &RandomConfig) -> Instance {
    let num_vehicles = num_vehicles.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = config.side / 2.0;
    let mut coords = vec![Point::new(half, half)];
    coords.extend((0..n).map(|_| Point::new(rng.gen_range(0.0..=config.side), rng.gen_range(0.0..=config.side))));
    let fleet = vec![fleet_capacity(n, num_vehicles); num_vehicles];
    let eps = config.epsilon.max(0.0);

    for attempt in 0u64.. {
        let mut wrng = ChaCha8Rng::seed_from_u64(seed);
        wrng.set_stream(attempt + 1);
        let scale = 1.0 + attempt as f64 / 4.0;
        let mut builder = Instance::builder(n)
            .name(format!("rand-n{n}-k{num_vehicles}-s{seed}"))
            .euclidean(coords.clone())
            .epsilon(eps)
            .fleet(fleet.clone());
        for i in 1..=n {
            let direct = coords[0].distance(&coords[i]);
            let start = (direct + wrng.gen_range(config.offset_min..=config.offset_max)).max(0.0);
            let width = scale * wrng.gen_range(config.width_min..=config.width_max);
            builder = builder.window(i, start, start.max(direct + eps) + width);
        }
        let instance = builder.build().expect("generated data is valid");
        if solve_heuristic(&instance, true, seed, config.screen_budget).is_ok() {
            return instance;
        }
    }
    unreachable!("window widths grow without bound")
}
