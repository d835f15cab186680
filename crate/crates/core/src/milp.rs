//! Mixed-integer linear model of the robust cumulative VRPTW as plain data:
//! variables with bounds, linear rows with a sense and right-hand side, and
//! integrality marks.
//!
//! Variables are `x[k][i][j]` (vehicle `k` uses arc `i -> j`, binary) for every
//! ordered pair of distinct nodes in `0..=n+1`, followed by latencies `l[i]`
//! for `i` in `0..=n+1`. Arc variables are laid out in `(k, i, j)`
//! lexicographic order, so a smaller column index means a smaller triple.
//!
//! Arc time `t(i, j) = service(i) + d(i, j)`, where `d` is `d̄` or `d̄ + ε`
//! depending on the regime. Latencies are monotone in arc times, so a schedule
//! feasible for `d̄ + ε` stays feasible for every `d` in the box: that is the
//! whole robust counterpart.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::model::{DurationRealization, DurationRegime, Instance, Route, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowFamily {
    /// Every customer is left exactly once.
    Assignment,
    /// Per vehicle and customer: inflow equals outflow.
    FlowConservation,
    /// Each vehicle leaves the depot at most once.
    DepotDeparture,
    /// Each vehicle enters the dummy terminal at most once.
    TerminalArrival,
    /// Nothing leaves the dummy terminal.
    TerminalOutflow,
    /// Nothing enters the depot.
    DepotInflow,
    /// Customers served per vehicle are bounded by its capacity.
    Capacity,
    /// Big-M latency precedence between customers.
    Precedence,
    /// Big-M precedence on depot departures.
    DepotPrecedence,
    /// Big-M precedence into the dummy terminal.
    TerminalPrecedence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Arc { vehicle: usize, from: usize, to: usize },
    Latency { node: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub objective: f64,
}

impl Variable {
    pub fn name(&self) -> String {
        match self.kind {
            VarKind::Arc { vehicle, from, to } => format!("x_{vehicle}_{from}_{to}"),
            VarKind::Latency { node } => format!("l_{node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub family: RowFamily,
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Number of rows per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RowCensus {
    pub assignment: usize,
    pub flow: usize,
    pub trip: usize,
    pub dummy_flow: usize,
    pub capacity: usize,
    pub precedence: usize,
}

impl RowCensus {
    /// Row counts implied by `n` customers and `m` vehicles.
    pub fn expected(n: usize, m: usize) -> Self {
        RowCensus {
            assignment: n,
            flow: n * m,
            trip: 2 * m,
            dummy_flow: 2,
            capacity: m,
            precedence: m * n * n.saturating_sub(1) + 2 * m * n,
        }
    }

    pub fn total(&self) -> usize {
        self.assignment + self.flow + self.trip + self.dummy_flow + self.capacity + self.precedence
    }
}

/// Reason an assignment fails the model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelViolation {
    Bound { var: String, value: f64 },
    Integrality { var: String, value: f64 },
    Row { row: String, amount: f64 },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::Bound { var, value } => write!(f, "{var} = {value} out of bounds"),
            ModelViolation::Integrality { var, value } => write!(f, "{var} = {value} not integral"),
            ModelViolation::Row { row, amount } => write!(f, "row {row} violated by {amount}"),
        }
    }
}

/// Failure to turn arc values back into routes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("customer {0} is not reached from the depot (subtour or missing arc)")]
    Unreached(usize),
    #[error("vehicle {vehicle} revisits node {node}")]
    Cycle { vehicle: usize, node: usize },
    #[error("vehicle {vehicle} has {count} successors at node {node}")]
    Branching { vehicle: usize, node: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    instance: Instance,
    regime: DurationRegime,
    vars: Vec<Variable>,
    rows: Vec<Row>,
}

/// Builds the model; `robust` substitutes `d̄ + ε` for every real arc.
pub fn build_model(instance: &Instance, robust: bool) -> MilpModel {
    MilpModel::build(instance, DurationRegime::from_robust(robust))
}

impl MilpModel {
    pub fn build(instance: &Instance, regime: DurationRegime) -> MilpModel {
        let n = instance.n();
        let m = instance.num_vehicles();
        let nodes = n + 2;
        let dummy = n + 1;
        let mut vars = Vec::with_capacity(m * nodes * (nodes - 1) + nodes);
        for k in 0..m {
            for i in 0..nodes {
                for j in (0..nodes).filter(|&j| j != i) {
                    vars.push(Variable {
                        kind: VarKind::Arc { vehicle: k, from: i, to: j },
                        lower: 0.0,
                        upper: 1.0,
                        integer: true,
                        objective: 0.0,
                    });
                }
            }
        }
        for i in 0..nodes {
            let (lower, upper, objective) = if i == 0 {
                (0.0, 0.0, 0.0)
            } else if i == dummy {
                (0.0, f64::INFINITY, 0.0)
            } else {
                let w = instance.window(i);
                (w.start, w.end, 1.0)
            };
            vars.push(Variable { kind: VarKind::Latency { node: i }, lower, upper, integer: false, objective });
        }

        let mut model = MilpModel { instance: instance.clone(), regime, vars, rows: Vec::new() };
        let x = |k: usize, i: usize, j: usize| model.arc_var(k, i, j);
        let l = |i: usize| model.latency_var(i);
        let mut rows = Vec::new();
        let customers = 1..=n;

        for i in customers.clone() {
            let terms =
                (0..m).flat_map(|k| (0..nodes).filter(move |&j| j != i).map(move |j| (x(k, i, j), 1.0))).collect();
            rows.push(Row {
                family: RowFamily::Assignment,
                name: format!("assign_{i}"),
                terms,
                sense: Sense::Eq,
                rhs: 1.0,
            });
        }
        for k in 0..m {
            for i in customers.clone() {
                let mut terms: Vec<(usize, f64)> = (0..nodes).filter(|&j| j != i).map(|j| (x(k, j, i), 1.0)).collect();
                terms.extend((0..nodes).filter(|&j| j != i).map(|j| (x(k, i, j), -1.0)));
                rows.push(Row {
                    family: RowFamily::FlowConservation,
                    name: format!("flow_{k}_{i}"),
                    terms,
                    sense: Sense::Eq,
                    rhs: 0.0,
                });
            }
        }
        for k in 0..m {
            rows.push(Row {
                family: RowFamily::DepotDeparture,
                name: format!("depart_{k}"),
                terms: customers.clone().map(|j| (x(k, 0, j), 1.0)).collect(),
                sense: Sense::Le,
                rhs: 1.0,
            });
            rows.push(Row {
                family: RowFamily::TerminalArrival,
                name: format!("arrive_{k}"),
                terms: customers.clone().map(|i| (x(k, i, dummy), 1.0)).collect(),
                sense: Sense::Le,
                rhs: 1.0,
            });
        }
        rows.push(Row {
            family: RowFamily::TerminalOutflow,
            name: "terminal_out".into(),
            terms: (0..m).flat_map(|k| (0..=n).map(move |j| (x(k, dummy, j), 1.0))).collect(),
            sense: Sense::Eq,
            rhs: 0.0,
        });
        rows.push(Row {
            family: RowFamily::DepotInflow,
            name: "depot_in".into(),
            terms: (0..m).flat_map(|k| (1..nodes).map(move |i| (x(k, i, 0), 1.0))).collect(),
            sense: Sense::Eq,
            rhs: 0.0,
        });
        for k in 0..m {
            let terms = (0..nodes)
                .flat_map(|i| customers.clone().filter(move |&j| j != i).map(move |j| (x(k, i, j), 1.0)))
                .collect();
            rows.push(Row {
                family: RowFamily::Capacity,
                name: format!("capacity_{k}"),
                terms,
                sense: Sense::Le,
                rhs: instance.capacity(k) as f64,
            });
        }
        // l_i - l_j + M x_ij <= M - t_ij, with M = f_i + t_ij (f_0 = 0).
        let window_end = |i: usize| if i == 0 { 0.0 } else { instance.window(i).end };
        let start_slack = |j: usize| if j == dummy { 0.0 } else { (-instance.window(j).start).max(0.0) };
        for k in 0..m {
            for i in customers.clone() {
                for j in customers.clone().filter(|&j| j != i) {
                    let t = model.arc_time(i, j);
                    let big_m = window_end(i) + start_slack(j) + t;
                    rows.push(Row {
                        family: RowFamily::Precedence,
                        name: format!("prec_{k}_{i}_{j}"),
                        terms: vec![(l(i), 1.0), (l(j), -1.0), (x(k, i, j), big_m)],
                        sense: Sense::Le,
                        rhs: big_m - t,
                    });
                }
            }
            for j in customers.clone() {
                let t = model.arc_time(0, j);
                let big_m = start_slack(j) + t;
                rows.push(Row {
                    family: RowFamily::DepotPrecedence,
                    name: format!("prec_{k}_0_{j}"),
                    terms: vec![(l(0), 1.0), (l(j), -1.0), (x(k, 0, j), big_m)],
                    sense: Sense::Le,
                    rhs: big_m - t,
                });
            }
            for i in customers.clone() {
                let big_m = window_end(i);
                rows.push(Row {
                    family: RowFamily::TerminalPrecedence,
                    name: format!("prec_{k}_{i}_{dummy}"),
                    terms: vec![(l(i), 1.0), (l(dummy), -1.0), (x(k, i, dummy), big_m)],
                    sense: Sense::Le,
                    rhs: big_m,
                });
            }
        }
        model.rows = rows;
        model
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn regime(&self) -> DurationRegime {
        self.regime
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_vehicles(&self) -> usize {
        self.instance.num_vehicles()
    }

    /// Overrides a variable's bounds (used for branching and what-if checks).
    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.vars[var].lower = lower;
        self.vars[var].upper = upper;
    }

    /// `service(i) + d(i, j)` under the model's regime; zero into the dummy.
    pub fn arc_time(&self, from: usize, to: usize) -> f64 {
        if to == self.instance.dummy() {
            return 0.0;
        }
        self.instance.service(from) + self.instance.duration(from, to, self.regime)
    }

    pub fn durations(&self) -> DurationRealization {
        DurationRealization::for_regime(&self.instance, self.regime)
    }

    pub fn arc_var(&self, vehicle: usize, from: usize, to: usize) -> usize {
        let nodes = self.instance.n() + 2;
        debug_assert!(from != to && from < nodes && to < nodes);
        let col = if to < from { to } else { to - 1 };
        vehicle * nodes * (nodes - 1) + from * (nodes - 1) + col
    }

    pub fn latency_var(&self, node: usize) -> usize {
        let nodes = self.instance.n() + 2;
        self.num_vehicles() * nodes * (nodes - 1) + node
    }

    pub fn census(&self) -> RowCensus {
        let mut c = RowCensus::default();
        for row in &self.rows {
            match row.family {
                RowFamily::Assignment => c.assignment += 1,
                RowFamily::FlowConservation => c.flow += 1,
                RowFamily::DepotDeparture | RowFamily::TerminalArrival => c.trip += 1,
                RowFamily::TerminalOutflow | RowFamily::DepotInflow => c.dummy_flow += 1,
                RowFamily::Capacity => c.capacity += 1,
                RowFamily::Precedence | RowFamily::DepotPrecedence | RowFamily::TerminalPrecedence => c.precedence += 1,
            }
        }
        c
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.objective * x).sum()
    }

    /// Variable assignment for `routes`, with latencies set to the
    /// earliest-start schedule under the model's regime. Customers outside
    /// every route keep their window start.
    pub fn encode(&self, routes: &[Route]) -> Vec<f64> {
        let n = self.instance.n();
        let dummy = n + 1;
        let mut values = vec![0.0; self.vars.len()];
        for i in 1..=n {
            values[self.latency_var(i)] = self.instance.window(i).start;
        }
        let mut last_latency: f64 = 0.0;
        for route in routes.iter().filter(|r| !r.stops.is_empty()) {
            let mut prev = 0;
            let mut clock = 0.0;
            for &stop in &route.stops {
                values[self.arc_var(route.vehicle, prev, stop)] = 1.0;
                clock = (clock + self.arc_time(prev, stop)).max(self.instance.window(stop).start);
                values[self.latency_var(stop)] = clock;
                prev = stop;
            }
            values[self.arc_var(route.vehicle, prev, dummy)] = 1.0;
            last_latency = last_latency.max(clock);
        }
        values[self.latency_var(dummy)] = last_latency;
        values
    }

    /// Checks bounds, integrality and every row within `tol`.
    pub fn check(&self, values: &[f64], tol: f64) -> Result<(), ModelViolation> {
        for (v, &x) in self.vars.iter().zip(values) {
            if x < v.lower - tol || x > v.upper + tol {
                return Err(ModelViolation::Bound { var: v.name(), value: x });
            }
            if v.integer && (x - x.round()).abs() > tol {
                return Err(ModelViolation::Integrality { var: v.name(), value: x });
            }
        }
        for row in &self.rows {
            let amount = row.violation(values);
            if amount > tol {
                return Err(ModelViolation::Row { row: row.name.clone(), amount });
            }
        }
        Ok(())
    }

    /// Follows arcs with value above one half from the depot for each vehicle.
    pub fn decode(&self, values: &[f64]) -> Result<Vec<Route>, DecodeError> {
        let n = self.instance.n();
        let nodes = n + 2;
        let mut seen = vec![false; n + 1];
        let mut routes = Vec::new();
        for k in 0..self.num_vehicles() {
            let mut stops = Vec::new();
            let mut at = 0;
            loop {
                let next: Vec<usize> =
                    (0..nodes).filter(|&j| j != at && values[self.arc_var(k, at, j)] > 0.5).collect();
                let Some(&first) = next.first() else { break };
                if next.len() > 1 {
                    return Err(DecodeError::Branching { vehicle: k, node: at, count: next.len() });
                }
                if first == n + 1 || first == 0 {
                    break;
                }
                if seen[first] {
                    return Err(DecodeError::Cycle { vehicle: k, node: first });
                }
                seen[first] = true;
                stops.push(first);
                at = first;
            }
            if !stops.is_empty() {
                routes.push(Route::new(k, stops));
            }
        }
        if let Some(c) = (1..=n).find(|&c| !seen[c]) {
            return Err(DecodeError::Unreached(c));
        }
        Ok(routes)
    }

    /// Decodes `values` and schedules the routes under the model's regime.
    pub fn decode_solution(&self, values: &[f64]) -> Result<Solution, DecodeError> {
        let routes = self.decode(values)?;
        Ok(Solution::from_routes(&self.instance, routes, &self.durations())
            .expect("decoded routes reference valid nodes"))
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp<W: Write>(&self, out: &mut W) -> io::Result<()> {
        fn term(out: &mut impl Write, first: bool, coef: f64, name: &str) -> io::Result<()> {
            let sign = if coef < 0.0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = coef.abs();
            let lead = if sign.is_empty() { String::new() } else { format!(" {sign}") };
            if (mag - 1.0).abs() < 1e-15 {
                write!(out, "{lead} {name}")
            } else {
                write!(out, "{lead} {mag} {name}")
            }
        }
        writeln!(out, "\\ {} ({:?} durations)", self.instance.name(), self.regime)?;
        writeln!(out, "Minimize")?;
        write!(out, " obj:")?;
        let mut first = true;
        for v in self.vars.iter().filter(|v| v.objective != 0.0) {
            term(out, first, v.objective, &v.name())?;
            first = false;
        }
        if first {
            write!(out, " 0 l_0")?;
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for row in &self.rows {
            write!(out, " {}:", row.name)?;
            if row.terms.is_empty() {
                write!(out, " 0 l_0")?;
            }
            for (idx, &(v, c)) in row.terms.iter().enumerate() {
                term(out, idx == 0, c, &self.vars[v].name())?;
            }
            writeln!(out, " {} {}", row.sense, row.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for v in self.vars.iter().filter(|v| !v.integer) {
            if v.upper.is_infinite() {
                writeln!(out, " {} >= {}", v.name(), v.lower)?;
            } else {
                writeln!(out, " {} <= {} <= {}", v.lower, v.name(), v.upper)?;
            }
        }
        writeln!(out, "Binaries")?;
        for v in self.vars.iter().filter(|v| v.integer) {
            writeln!(out, " {}", v.name())?;
        }
        writeln!(out, "End")
    }
}
