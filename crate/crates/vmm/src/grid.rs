//! 1 m x 1 m roughness grid, threshold classes and the speed factor β.
//!
//! Cell `(row, col)` covers `x ∈ [row, row+1)`, `y ∈ [col, col+1)`. Class
//! intervals are half-open with boundaries assigned to the rougher class:
//! smooth `[0, 0.05)`, moderate `[0.05, 0.20)`, rough `[0.20, ∞)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cloud::PointCloud;
use crate::plane::Plane;

pub const CELL_SIZE: f64 = 1.0;
pub const MODERATE_FROM: f64 = 0.05;
pub const ROUGH_FROM: f64 = 0.20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoughnessClass {
    Smooth,
    Moderate,
    Rough,
    Unknown,
}

impl RoughnessClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoughnessClass::Smooth => "smooth",
            RoughnessClass::Moderate => "moderate",
            RoughnessClass::Rough => "rough",
            RoughnessClass::Unknown => "unknown",
        }
    }

    /// Speed factor for the class; unknown terrain is not throttled.
    pub fn beta(&self) -> f64 {
        match self {
            RoughnessClass::Smooth | RoughnessClass::Unknown => 1.0,
            RoughnessClass::Moderate => 0.75,
            RoughnessClass::Rough => 0.5,
        }
    }
}

impl fmt::Display for RoughnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(score: f64) -> RoughnessClass {
    if !(score >= 0.0) {
        RoughnessClass::Unknown
    } else if score < MODERATE_FROM {
        RoughnessClass::Smooth
    } else if score < ROUGH_FROM {
        RoughnessClass::Moderate
    } else {
        RoughnessClass::Rough
    }
}

pub fn beta_for_score(score: f64) -> f64 {
    classify(score).beta()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Mean absolute point-to-plane distance; NaN when the cell is empty.
    pub mean_distance: f64,
    pub class: RoughnessClass,
    pub sample_count: usize,
}

impl Cell {
    fn empty() -> Cell {
        Cell { mean_distance: f64::NAN, class: RoughnessClass::Unknown, sample_count: 0 }
    }

    pub fn score(&self) -> Option<f64> {
        (self.sample_count > 0).then_some(self.mean_distance)
    }
}

/// Cells over the bounding box of the cloud, empty ones included as unknown.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoughnessGrid {
    cells: BTreeMap<(i64, i64), Cell>,
}

pub fn cell_of(x: f64, y: f64) -> (i64, i64) {
    ((x / CELL_SIZE).floor() as i64, (y / CELL_SIZE).floor() as i64)
}

pub fn roughness_grid(cloud: &PointCloud, plane: &Plane) -> RoughnessGrid {
    let mut sums: BTreeMap<(i64, i64), (f64, usize)> = BTreeMap::new();
    for p in cloud.points() {
        let e = sums.entry(cell_of(p.x, p.y)).or_insert((0.0, 0));
        e.0 += plane.distance(p);
        e.1 += 1;
    }
    let mut cells = BTreeMap::new();
    if let (Some(rmin), Some(rmax)) = (sums.keys().map(|k| k.0).min(), sums.keys().map(|k| k.0).max()) {
        let cmin = sums.keys().map(|k| k.1).min().expect("non-empty");
        let cmax = sums.keys().map(|k| k.1).max().expect("non-empty");
        for r in rmin..=rmax {
            for c in cmin..=cmax {
                cells.insert((r, c), Cell::empty());
            }
        }
    }
    for (key, (sum, count)) in sums {
        let mean = sum / count as f64;
        cells.insert(key, Cell { mean_distance: mean, class: classify(mean), sample_count: count });
    }
    RoughnessGrid { cells }
}

impl RoughnessGrid {
    pub fn get(&self, row: i64, col: i64) -> Option<&Cell> {
        self.cells.get(&(row, col))
    }

    pub fn cells(&self) -> impl Iterator<Item = ((i64, i64), &Cell)> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `row,col,mean,class`; empty cells have an empty mean.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,mean,class\n");
        for ((r, c), cell) in &self.cells {
            let mean = cell.score().map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!("{r},{c},{mean},{}\n", cell.class));
        }
        out
    }

    /// Mean of the known cell scores in rows intersecting `[x0, x1)` and
    /// columns intersecting `[y0, y1)`.
    pub fn region_score(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Option<f64> {
        let (r0, c0) = cell_of(x0, y0);
        let r1 = (x1 / CELL_SIZE).ceil() as i64 - 1;
        let c1 = (y1 / CELL_SIZE).ceil() as i64 - 1;
        let scores: Vec<f64> = (r0..=r1)
            .flat_map(|r| (c0..=c1).map(move |c| (r, c)))
            .filter_map(|k| self.cells.get(&k).and_then(Cell::score))
            .collect();
        (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
    }

    /// Per-meter class along the wheel corridor `|y| < half_width`, rows `0..length`.
    pub fn corridor_profile(&self, length: usize, half_width: f64) -> Vec<RoughnessClass> {
        (0..length)
            .map(|r| {
                let x = r as f64 * CELL_SIZE;
                self.region_score(x, x + CELL_SIZE, -half_width, half_width).map_or(RoughnessClass::Unknown, classify)
            })
            .collect()
    }
}

/// Region sampled ahead of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookahead {
    pub distance: f64,
    pub half_width: f64,
}

impl Default for Lookahead {
    fn default() -> Self {
        Lookahead { distance: 2.0, half_width: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedDecision {
    pub beta: f64,
    pub score: Option<f64>,
    pub class: RoughnessClass,
    /// No sampled cell had points; β falls back to 1.
    pub unknown_terrain: bool,
}

/// β from the cells within `lookahead.distance` in front of `x`.
pub fn speed_factor_at(grid: &RoughnessGrid, x: f64, lookahead: &Lookahead) -> SpeedDecision {
    match grid.region_score(x, x + lookahead.distance, -lookahead.half_width, lookahead.half_width) {
        Some(score) => {
            let class = classify(score);
            SpeedDecision { beta: class.beta(), score: Some(score), class, unknown_terrain: false }
        }
        None => SpeedDecision { beta: 1.0, score: None, class: RoughnessClass::Unknown, unknown_terrain: true },
    }
}

pub fn speed_factor(grid: &RoughnessGrid, lookahead: &Lookahead) -> SpeedDecision {
    speed_factor_at(grid, 0.0, lookahead)
}
