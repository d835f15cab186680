//! Domain types and the earliest-start route evaluation shared by every
//! solver and the simulator.
//!
//! Node ids: `0` is the depot, `1..=n` are customers and `n + 1` is the dummy
//! terminal. Arcs into the dummy terminal always have zero duration, so the
//! return trip never contributes to the objective.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Absolute slack used when comparing latencies against window ends.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Customer availability interval `[start, end]`, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Self {
        TimeWindow { start, end }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start - FEASIBILITY_TOL && t <= self.end + FEASIBILITY_TOL
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Which duration matrix a solver plans against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DurationRegime {
    /// `d̄`
    Nominal,
    /// `d̄ + ε` on every real arc.
    WorstCase,
}

impl DurationRegime {
    pub fn from_robust(robust: bool) -> Self {
        if robust {
            DurationRegime::WorstCase
        } else {
            DurationRegime::Nominal
        }
    }
}

/// A complete problem datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    name: String,
    customers: usize,
    /// Row-major `(n+1) x (n+1)` nominal durations over depot and customers.
    nominal: Vec<f64>,
    epsilon: f64,
    windows: Vec<TimeWindow>,
    /// Per-node service time, depot included.
    service: Vec<f64>,
    fleet: Vec<u32>,
    coords: Option<Vec<Point>>,
}

impl Instance {
    pub fn builder(customers: usize) -> InstanceBuilder {
        InstanceBuilder::new(customers)
    }

    /// Instance with Euclidean durations (one meter per second) derived from
    /// `coords`, where `coords[0]` is the depot.
    pub fn from_coords(coords: Vec<Point>, windows: Vec<TimeWindow>, fleet: Vec<u32>) -> Result<Instance, ModelError> {
        let n = coords.len().saturating_sub(1);
        let mut builder = Instance::builder(n).euclidean(coords).fleet(fleet);
        for (i, w) in windows.into_iter().enumerate() {
            builder = builder.window(i + 1, w.start, w.end);
        }
        builder.build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Number of customers `n`.
    pub fn n(&self) -> usize {
        self.customers
    }

    /// Id of the dummy terminal node.
    pub fn dummy(&self) -> usize {
        self.customers + 1
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.customers
    }

    pub fn num_vehicles(&self) -> usize {
        self.fleet.len()
    }

    pub fn fleet(&self) -> &[u32] {
        &self.fleet
    }

    pub fn capacity(&self, vehicle: usize) -> u32 {
        self.fleet[vehicle]
    }

    pub fn total_capacity(&self) -> u64 {
        self.fleet.iter().map(|&c| c as u64).sum()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Returns a copy with a different uncertainty half-width.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Instance, ModelError> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(ModelError::InvalidEpsilon(epsilon));
        }
        let mut out = self.clone();
        out.epsilon = epsilon;
        Ok(out)
    }

    /// Returns a copy with a different fleet.
    pub fn with_fleet(&self, fleet: Vec<u32>) -> Result<Instance, ModelError> {
        if let Some(k) = fleet.iter().position(|&c| c == 0) {
            return Err(ModelError::ZeroCapacity(k));
        }
        let mut out = self.clone();
        out.fleet = fleet;
        Ok(out)
    }

    /// Returns a copy whose windows are replaced by `f(customer, window)`.
    pub fn map_windows(&self, mut f: impl FnMut(usize, TimeWindow) -> TimeWindow) -> Result<Instance, ModelError> {
        let mut out = self.clone();
        for (idx, w) in out.windows.iter_mut().enumerate() {
            *w = f(idx + 1, *w);
        }
        out.validate()?;
        Ok(out)
    }

    pub fn window(&self, customer: usize) -> TimeWindow {
        self.windows[customer - 1]
    }

    pub fn windows(&self) -> &[TimeWindow] {
        &self.windows
    }

    pub fn service(&self, node: usize) -> f64 {
        if node > self.customers {
            0.0
        } else {
            self.service[node]
        }
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    /// Nominal duration `d̄(i, j)`; zero for arcs into the dummy terminal.
    pub fn nominal(&self, from: usize, to: usize) -> f64 {
        if to == self.dummy() {
            return 0.0;
        }
        self.nominal[from * (self.customers + 1) + to]
    }

    /// Duration of arc `(from, to)` under `regime`.
    pub fn duration(&self, from: usize, to: usize, regime: DurationRegime) -> f64 {
        if to == self.dummy() {
            return 0.0;
        }
        match regime {
            DurationRegime::Nominal => self.nominal(from, to),
            DurationRegime::WorstCase => self.nominal(from, to) + self.epsilon,
        }
    }

    pub(crate) fn nominal_matrix(&self) -> &[f64] {
        &self.nominal
    }

    pub fn is_node(&self, id: usize) -> bool {
        id <= self.customers
    }

    /// Re-checks every structural invariant; used after deserialization.
    pub fn validate(&self) -> Result<(), ModelError> {
        let size = self.customers + 1;
        if self.nominal.len() != size * size {
            return Err(ModelError::DimensionMismatch { expected: size, rows: self.nominal.len() / size.max(1) });
        }
        for i in 0..size {
            for j in 0..size {
                let v = self.nominal[i * size + j];
                if i != j && !(v.is_finite() && v >= 0.0) {
                    return Err(ModelError::InvalidDuration { from: i, to: j, value: v });
                }
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(ModelError::InvalidEpsilon(self.epsilon));
        }
        if self.windows.len() != self.customers {
            return Err(ModelError::DimensionMismatch { expected: self.customers, rows: self.windows.len() });
        }
        for (idx, w) in self.windows.iter().enumerate() {
            if !(w.start.is_finite() && w.end.is_finite() && w.start <= w.end) {
                return Err(ModelError::InvalidWindow { customer: idx + 1, start: w.start, end: w.end });
            }
        }
        if self.service.len() != size {
            return Err(ModelError::DimensionMismatch { expected: size, rows: self.service.len() });
        }
        for (node, &s) in self.service.iter().enumerate() {
            if !(s.is_finite() && s >= 0.0) {
                return Err(ModelError::InvalidService { node, value: s });
            }
        }
        if let Some(k) = self.fleet.iter().position(|&c| c == 0) {
            return Err(ModelError::ZeroCapacity(k));
        }
        if let Some(c) = &self.coords {
            if c.len() != size {
                return Err(ModelError::CoordinateCount { expected: size, got: c.len() });
            }
        }
        Ok(())
    }
}

/// Incremental constructor for [`Instance`].
///
/// Windows default to `[0, 1e9]`, service times to zero and the fleet to a
/// single vehicle able to carry every customer.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    name: String,
    customers: usize,
    nominal: Option<Vec<Vec<f64>>>,
    coords: Option<Vec<Point>>,
    epsilon: f64,
    windows: Vec<TimeWindow>,
    service: Vec<f64>,
    fleet: Option<Vec<u32>>,
}

/// Window end used when none is supplied.
pub const OPEN_HORIZON: f64 = 1e9;

impl InstanceBuilder {
    pub fn new(customers: usize) -> Self {
        InstanceBuilder {
            name: String::from("unnamed"),
            customers,
            nominal: None,
            coords: None,
            epsilon: 0.0,
            windows: vec![TimeWindow::new(0.0, OPEN_HORIZON); customers],
            service: vec![0.0; customers + 1],
            fleet: None,
        }
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Full `(n+1) x (n+1)` nominal matrix over depot and customers.
    pub fn nominal_matrix(mut self, rows: Vec<Vec<f64>>) -> Self {
        self.nominal = Some(rows);
        self
    }

    /// Sets `d̄(i, j) = d̄(j, i) = value`, starting from an all-zero matrix.
    pub fn symmetric(mut self, i: usize, j: usize, value: f64) -> Self {
        let size = self.customers + 1;
        let m = self.nominal.get_or_insert_with(|| vec![vec![0.0; size]; size]);
        if i < size && j < size {
            m[i][j] = value;
            m[j][i] = value;
        }
        self
    }

    /// Node coordinates (depot first); also defines Euclidean durations when no
    /// explicit matrix is given.
    pub fn euclidean(mut self, coords: Vec<Point>) -> Self {
        self.coords = Some(coords);
        self
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn window(mut self, customer: usize, start: f64, end: f64) -> Self {
        if (1..=self.customers).contains(&customer) {
            self.windows[customer - 1] = TimeWindow::new(start, end);
        }
        self
    }

    pub fn service(mut self, node: usize, time: f64) -> Self {
        if node <= self.customers {
            self.service[node] = time;
        }
        self
    }

    pub fn fleet(mut self, capacities: Vec<u32>) -> Self {
        self.fleet = Some(capacities);
        self
    }

    pub fn build(self) -> Result<Instance, ModelError> {
        let size = self.customers + 1;
        let nominal = match (self.nominal, &self.coords) {
            (Some(rows), _) => {
                if rows.len() != size {
                    return Err(ModelError::DimensionMismatch { expected: size, rows: rows.len() });
                }
                let mut flat = Vec::with_capacity(size * size);
                for row in rows {
                    if row.len() != size {
                        return Err(ModelError::DimensionMismatch { expected: size, rows: row.len() });
                    }
                    flat.extend(row);
                }
                for i in 0..size {
                    flat[i * size + i] = 0.0;
                }
                flat
            }
            (None, Some(coords)) => {
                if coords.len() != size {
                    return Err(ModelError::CoordinateCount { expected: size, got: coords.len() });
                }
                let mut flat = vec![0.0; size * size];
                for i in 0..size {
                    for j in 0..size {
                        flat[i * size + j] = coords[i].distance(&coords[j]);
                    }
                }
                flat
            }
            (None, None) => vec![0.0; size * size],
        };
        let fleet = self.fleet.unwrap_or_else(|| vec![self.customers.max(1) as u32]);
        let instance = Instance {
            name: self.name,
            customers: self.customers,
            nominal,
            epsilon: self.epsilon,
            windows: self.windows,
            service: self.service,
            fleet,
            coords: self.coords,
        };
        instance.validate()?;
        Ok(instance)
    }
}

/// One concrete travel-time matrix `d`, a member of the uncertainty box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationRealization {
    size: usize,
    durations: Vec<f64>,
}

impl DurationRealization {
    pub fn nominal(instance: &Instance) -> Self {
        DurationRealization { size: instance.n() + 1, durations: instance.nominal_matrix().to_vec() }
    }

    /// `d̄ + ε` on every arc.
    pub fn worst_case(instance: &Instance) -> Self {
        Self::shifted(instance, instance.epsilon())
    }

    /// `max(0, d̄ - ε)` on every arc.
    pub fn best_case(instance: &Instance) -> Self {
        Self::shifted(instance, -instance.epsilon())
    }

    pub fn for_regime(instance: &Instance, regime: DurationRegime) -> Self {
        match regime {
            DurationRegime::Nominal => Self::nominal(instance),
            DurationRegime::WorstCase => Self::worst_case(instance),
        }
    }

    fn shifted(instance: &Instance, delta: f64) -> Self {
        let size = instance.n() + 1;
        let mut durations = instance.nominal_matrix().to_vec();
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    let v = &mut durations[i * size + j];
                    *v = (*v + delta).max(0.0);
                }
            }
        }
        DurationRealization { size, durations }
    }

    /// Validates membership in the box `|d - d̄| <= ε`, `d >= 0`.
    pub fn from_matrix(instance: &Instance, durations: Vec<f64>) -> Result<Self, ModelError> {
        let size = instance.n() + 1;
        if durations.len() != size * size {
            return Err(ModelError::DimensionMismatch { expected: size, rows: durations.len() / size });
        }
        for i in 0..size {
            for j in 0..size {
                if i == j {
                    continue;
                }
                let v = durations[i * size + j];
                let dev = (v - instance.nominal(i, j)).abs();
                if !(v.is_finite() && v >= 0.0) || dev > instance.epsilon() + 1e-9 {
                    return Err(ModelError::OutsideUncertaintySet { from: i, to: j, value: v });
                }
            }
        }
        Ok(DurationRealization { size, durations })
    }

    /// `d(i, j)`; zero for arcs into the dummy terminal.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        if to >= self.size {
            return 0.0;
        }
        self.durations[from * self.size + to]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.durations
    }
}

/// Ordered customers served by one vehicle; depot and dummy are implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Route {
    pub vehicle: usize,
    pub stops: Vec<usize>,
}

impl Route {
    pub fn new(vehicle: usize, stops: Vec<usize>) -> Self {
        Route { vehicle, stops }
    }
}

/// Routes plus their earliest-start schedule.
///
/// `latency` and `idle` are indexed by node id (index 0 is the depot and is
/// always zero). Customers absent from every route keep a zero entry and are
/// reported as unserved by [`evaluate_solution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub latency: Vec<f64>,
    pub idle: Vec<f64>,
    pub objective: f64,
}

impl Solution {
    pub fn empty(instance: &Instance) -> Self {
        Solution {
            routes: Vec::new(),
            latency: vec![0.0; instance.n() + 1],
            idle: vec![0.0; instance.n() + 1],
            objective: 0.0,
        }
    }

    /// Schedules `routes` earliest-start under `durations`.
    pub fn from_routes(
        instance: &Instance,
        routes: Vec<Route>,
        durations: &DurationRealization,
    ) -> Result<Self, ModelError> {
        let mut sol = Solution::empty(instance);
        for route in &routes {
            let eval = evaluate_route(instance, route, durations)?;
            for (pos, &c) in route.stops.iter().enumerate() {
                sol.latency[c] = eval.latency[pos];
                sol.idle[c] = eval.idle[pos];
            }
            sol.objective += eval.objective;
        }
        sol.routes = routes;
        Ok(sol)
    }

    /// Drops empty routes and orders the rest by vehicle index.
    pub fn canonicalize(&mut self) {
        self.routes.retain(|r| !r.stops.is_empty());
        self.routes.sort_by_key(|r| r.vehicle);
    }

    pub fn total_idle(&self) -> f64 {
        self.idle.iter().sum()
    }

    pub fn served(&self) -> usize {
        self.routes.iter().map(|r| r.stops.len()).sum()
    }
}

/// Schedule of a single route.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteEvaluation {
    /// Service start per stop, in route order.
    pub latency: Vec<f64>,
    /// Waiting before the window opens, per stop.
    pub idle: Vec<f64>,
    /// Customers whose service starts after their window closes.
    pub window_violations: Vec<usize>,
    pub over_capacity: bool,
    /// Sum of `latency`.
    pub objective: f64,
}

impl RouteEvaluation {
    pub fn is_feasible(&self) -> bool {
        self.window_violations.is_empty() && !self.over_capacity
    }
}

/// Earliest-start schedule: `l_j = max(s_j, l_prev + service_prev + d(prev, j))`
/// with the vehicle leaving the depot at time zero.
pub fn evaluate_route(
    instance: &Instance,
    route: &Route,
    durations: &DurationRealization,
) -> Result<RouteEvaluation, ModelError> {
    if route.vehicle >= instance.num_vehicles() {
        return Err(ModelError::UnknownVehicle(route.vehicle));
    }
    if let Some(&bad) = route.stops.iter().find(|&&c| c == 0 || c > instance.n()) {
        return Err(ModelError::UnknownNode(bad));
    }
    let mut latency = Vec::with_capacity(route.stops.len());
    let mut idle = Vec::with_capacity(route.stops.len());
    let mut window_violations = Vec::new();
    let mut prev = 0usize;
    let mut clock = 0.0f64;
    for &stop in &route.stops {
        let arrival = clock + instance.service(prev) + durations.get(prev, stop);
        let w = instance.window(stop);
        let start = arrival.max(w.start);
        if start > w.end + FEASIBILITY_TOL {
            window_violations.push(stop);
        }
        latency.push(start);
        idle.push(start - arrival);
        clock = start;
        prev = stop;
    }
    let objective = latency.iter().sum();
    Ok(RouteEvaluation {
        latency,
        idle,
        window_violations,
        over_capacity: route.stops.len() > instance.capacity(route.vehicle) as usize,
        objective,
    })
}

/// Aggregated evaluation of a whole solution; violations are collected, not thrown.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionReport {
    pub objective: f64,
    /// Objective contribution of each route, aligned with `solution.routes`.
    pub route_objectives: Vec<f64>,
    pub latency: Vec<f64>,
    pub idle: Vec<f64>,
    pub unserved: Vec<usize>,
    pub duplicated: Vec<usize>,
    /// Vehicles carrying more customers than their capacity.
    pub capacity_violations: Vec<usize>,
    pub window_violations: Vec<usize>,
    /// Vehicles used by more than one route.
    pub reused_vehicles: Vec<usize>,
    /// Route indices rejected because they reference unknown vehicles or nodes.
    pub invalid_routes: Vec<usize>,
}

impl SolutionReport {
    pub fn is_feasible(&self) -> bool {
        self.unserved.is_empty()
            && self.duplicated.is_empty()
            && self.capacity_violations.is_empty()
            && self.window_violations.is_empty()
            && self.reused_vehicles.is_empty()
            && self.invalid_routes.is_empty()
    }

    /// Human-readable one-line list of violations, empty when feasible.
    pub fn describe(&self) -> String {
        fn list(v: &[usize]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let mut parts = Vec::new();
        if !self.unserved.is_empty() {
            parts.push(format!("unserved: {{{}}}", list(&self.unserved)));
        }
        if !self.duplicated.is_empty() {
            parts.push(format!("duplicated: {{{}}}", list(&self.duplicated)));
        }
        if !self.capacity_violations.is_empty() {
            parts.push(format!("over capacity: {{{}}}", list(&self.capacity_violations)));
        }
        if !self.window_violations.is_empty() {
            parts.push(format!("late: {{{}}}", list(&self.window_violations)));
        }
        if !self.reused_vehicles.is_empty() {
            parts.push(format!("reused vehicles: {{{}}}", list(&self.reused_vehicles)));
        }
        if !self.invalid_routes.is_empty() {
            parts.push(format!("invalid routes: {{{}}}", list(&self.invalid_routes)));
        }
        parts.join("; ")
    }
}

pub fn evaluate_solution(instance: &Instance, solution: &Solution, durations: &DurationRealization) -> SolutionReport {
    let n = instance.n();
    let mut report = SolutionReport { latency: vec![0.0; n + 1], idle: vec![0.0; n + 1], ..Default::default() };
    let mut visits = vec![0usize; n + 1];
    let mut vehicle_uses = vec![0usize; instance.num_vehicles()];
    for (idx, route) in solution.routes.iter().enumerate() {
        match evaluate_route(instance, route, durations) {
            Ok(eval) => {
                vehicle_uses[route.vehicle] += 1;
                for (pos, &c) in route.stops.iter().enumerate() {
                    visits[c] += 1;
                    report.latency[c] = eval.latency[pos];
                    report.idle[c] = eval.idle[pos];
                }
                if eval.over_capacity {
                    report.capacity_violations.push(route.vehicle);
                }
                report.window_violations.extend(&eval.window_violations);
                report.objective += eval.objective;
                report.route_objectives.push(eval.objective);
            }
            Err(_) => {
                report.invalid_routes.push(idx);
                report.route_objectives.push(0.0);
            }
        }
    }
    for c in 1..=n {
        match visits[c] {
            0 => report.unserved.push(c),
            1 => {}
            _ => report.duplicated.push(c),
        }
    }
    report.reused_vehicles = vehicle_uses.iter().enumerate().filter(|(_, &u)| u > 1).map(|(k, _)| k).collect();
    report.window_violations.sort_unstable();
    report.window_violations.dedup();
    report.capacity_violations.sort_unstable();
    report.capacity_violations.dedup();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_customers(s2: f64, f2: f64) -> Instance {
        Instance::builder(2)
            .symmetric(0, 1, 10.0)
            .symmetric(1, 2, 5.0)
            .symmetric(0, 2, 12.0)
            .window(1, 0.0, 1e6)
            .window(2, s2, f2)
            .build()
            .unwrap()
    }

    #[test]
    fn pure_cumulative_sums() {
        let inst = two_customers(0.0, 1e6);
        let d = DurationRealization::nominal(&inst);
        let eval = evaluate_route(&inst, &Route::new(0, vec![1, 2]), &d).unwrap();
        assert_eq!(eval.latency, vec![10.0, 15.0]);
        assert_eq!(eval.idle, vec![0.0, 0.0]);
        assert_eq!(eval.objective, 25.0);
        assert!(eval.is_feasible());
    }

    #[test]
    fn waiting_for_window() {
        let inst = two_customers(20.0, 1e6);
        let d = DurationRealization::nominal(&inst);
        let eval = evaluate_route(&inst, &Route::new(0, vec![1, 2]), &d).unwrap();
        assert_eq!(eval.latency, vec![10.0, 20.0]);
        assert_eq!(eval.idle[1], 5.0);
    }

    #[test]
    fn late_arrival_is_infeasible() {
        let inst = two_customers(0.0, 12.0);
        let d = DurationRealization::nominal(&inst);
        let eval = evaluate_route(&inst, &Route::new(0, vec![1, 2]), &d).unwrap();
        assert_eq!(eval.window_violations, vec![2]);
        assert!(!eval.is_feasible());
    }

    #[test]
    fn unknown_ids_and_empty_routes() {
        let inst = two_customers(0.0, 1e6);
        let d = DurationRealization::nominal(&inst);
        assert_eq!(evaluate_route(&inst, &Route::new(0, vec![3]), &d), Err(ModelError::UnknownNode(3)));
        assert_eq!(evaluate_route(&inst, &Route::new(0, vec![0]), &d), Err(ModelError::UnknownNode(0)));
        assert_eq!(evaluate_route(&inst, &Route::new(4, vec![1]), &d), Err(ModelError::UnknownVehicle(4)));
        let empty = evaluate_route(&inst, &Route::new(0, vec![]), &d).unwrap();
        assert!(empty.latency.is_empty());
        assert!(empty.is_feasible());
    }

    #[test]
    fn service_time_delays_departure() {
        let inst = Instance::builder(2).symmetric(0, 1, 10.0).symmetric(1, 2, 5.0).service(1, 3.0).build().unwrap();
        let d = DurationRealization::nominal(&inst);
        let eval = evaluate_route(&inst, &Route::new(0, vec![1, 2]), &d).unwrap();
        assert_eq!(eval.latency, vec![10.0, 18.0]);
    }

    #[test]
    fn parallel_single_customer_routes() {
        let inst = Instance::builder(2)
            .symmetric(0, 1, 7.0)
            .symmetric(0, 2, 7.0)
            .symmetric(1, 2, 3.0)
            .fleet(vec![1, 1])
            .build()
            .unwrap();
        let d = DurationRealization::nominal(&inst);
        let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1]), Route::new(1, vec![2])], &d).unwrap();
        let report = evaluate_solution(&inst, &sol, &d);
        assert!(report.is_feasible());
        assert_eq!(report.objective, 14.0);
    }

    #[test]
    fn unserved_customer_reported() {
        let inst = two_customers(0.0, 1e6);
        let d = DurationRealization::nominal(&inst);
        let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1])], &d).unwrap();
        let report = evaluate_solution(&inst, &sol, &d);
        assert_eq!(report.unserved, vec![2]);
        assert_eq!(report.describe(), "unserved: {2}");
        assert!(!report.is_feasible());
    }

    #[test]
    fn capacity_violation_flagged() {
        let inst = Instance::builder(3)
            .symmetric(0, 1, 1.0)
            .symmetric(1, 2, 1.0)
            .symmetric(2, 3, 1.0)
            .fleet(vec![2])
            .build()
            .unwrap();
        let d = DurationRealization::nominal(&inst);
        let sol = Solution::from_routes(&inst, vec![Route::new(0, vec![1, 2, 3])], &d).unwrap();
        let report = evaluate_solution(&inst, &sol, &d);
        assert_eq!(report.capacity_violations, vec![0]);
        assert!(report.unserved.is_empty());
    }

    #[test]
    fn duplicates_and_reused_vehicles() {
        let inst = two_customers(0.0, 1e6).with_fleet(vec![2, 2]).unwrap();
        let d = DurationRealization::nominal(&inst);
        let sol =
            Solution { routes: vec![Route::new(0, vec![1, 2]), Route::new(0, vec![2])], ..Solution::empty(&inst) };
        let report = evaluate_solution(&inst, &sol, &d);
        assert_eq!(report.duplicated, vec![2]);
        assert_eq!(report.reused_vehicles, vec![0]);
    }

    #[test]
    fn builder_rejects_bad_data() {
        assert!(matches!(
            Instance::builder(1).window(1, 5.0, 4.0).build(),
            Err(ModelError::InvalidWindow { customer: 1, .. })
        ));
        assert!(matches!(Instance::builder(1).symmetric(0, 1, -1.0).build(), Err(ModelError::InvalidDuration { .. })));
        assert!(matches!(Instance::builder(1).epsilon(-0.5).build(), Err(ModelError::InvalidEpsilon(_))));
        assert!(matches!(Instance::builder(1).fleet(vec![0]).build(), Err(ModelError::ZeroCapacity(0))));
    }

    #[test]
    fn dummy_arcs_are_free() {
        let inst = two_customers(0.0, 1e6).with_epsilon(3.0).unwrap();
        assert_eq!(inst.nominal(1, 3), 0.0);
        assert_eq!(inst.duration(1, 3, DurationRegime::WorstCase), 0.0);
        assert_eq!(inst.duration(0, 1, DurationRegime::WorstCase), 13.0);
        assert_eq!(DurationRealization::worst_case(&inst).get(2, 3), 0.0);
    }

    #[test]
    fn realization_membership() {
        let inst = two_customers(0.0, 1e6).with_epsilon(1.0).unwrap();
        let mut m = DurationRealization::nominal(&inst).as_slice().to_vec();
        m[1] += 0.5;
        assert!(DurationRealization::from_matrix(&inst, m.clone()).is_ok());
        m[1] += 1.0;
        assert!(matches!(
            DurationRealization::from_matrix(&inst, m),
            Err(ModelError::OutsideUncertaintySet { from: 0, to: 1, .. })
        ));
    }
}
