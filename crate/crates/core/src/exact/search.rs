//! Best-first branch and bound over arc variables in route order.
//!
//! A node fixes a prefix of the routes: vehicles `0..k` are closed, vehicle `k`
//! is open and ends at node `last` with service start `clock`. Every customer
//! not yet placed (the set `U`) still needs a latency.
//!
//! # Bound
//!
//! Let `t(i, j)` be the model arc time. For `j` in `U` define `e_j` as the
//! fixpoint of
//!
//! ```text
//! e_j = max(s_j, min(clock + t(last, j), t(0, j), min_{p in U} e_p + t(p, j)))
//! ```
//!
//! (the depot term only when an unused vehicle remains, the open-vehicle term
//! only when it has spare capacity). Any completion starts `j` after a
//! predecessor that is either the open vehicle's end, the depot, or another
//! customer of `U`, so `l_j >= e_j` by induction along the route.
//!
//! Second, each vehicle serves its new customers in some order; the `r`-th of
//! them starts no earlier than `origin + a + (r - 1) * delta`, where `a` is the
//! cheapest arc from the vehicle's current end into `U` and `delta` the
//! cheapest arc inside `U`. This gives a multiset of slot values, one per
//! remaining unit of capacity, and a completion occupies `|U|` distinct slots.
//!
//! If `L` are the completion latencies, the `i`-th smallest of them dominates
//! both the `i`-th smallest `e` and the `i`-th smallest slot value, hence
//!
//! ```text
//! bound = sum of fixed latencies + sum_i max(e_(i), slot_(i))
//! ```
//!
//! is a valid lower bound. A node is infeasible when some `e_j > f_j` or the
//! remaining capacity is smaller than `|U|`.
//!
//! # Symmetry
//!
//! Within a run of consecutive vehicles with equal capacity, non-empty routes
//! come first and are ordered by their first customer; any solution can be
//! permuted into that form without changing its objective.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{usable_warm_start, ExactError, ExactOptions, ExactOutcome, SolveStatus};
use crate::milp::MilpModel;
use crate::model::{Route, Solution, FEASIBILITY_TOL};

/// Largest customer count representable in the node bitset.
pub const MAX_CUSTOMERS: usize = 127;

const CLOSE: u8 = 0;
const PRUNE_TOL: f64 = 1e-9;

struct Data {
    n: usize,
    caps: Vec<usize>,
    /// First vehicle of each vehicle's equal-capacity run.
    block_start: Vec<usize>,
    /// Row-major `(n+1)^2` arc times including service.
    t: Vec<f64>,
    start: Vec<f64>,
    end: Vec<f64>,
    /// Sum of capacities of vehicles `k..m`.
    cap_suffix: Vec<usize>,
}

impl Data {
    fn new(model: &MilpModel) -> Data {
        let inst = model.instance();
        let n = inst.n();
        let m = inst.num_vehicles();
        let caps: Vec<usize> = inst.fleet().iter().map(|&c| c as usize).collect();
        let mut block_start = vec![0; m];
        for k in 1..m {
            block_start[k] = if caps[k] == caps[k - 1] { block_start[k - 1] } else { k };
        }
        let mut t = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    t[i * (n + 1) + j] = model.arc_time(i, j);
                }
            }
        }
        let mut start = vec![0.0; n + 1];
        let mut end = vec![0.0; n + 1];
        for c in 1..=n {
            start[c] = inst.window(c).start;
            end[c] = inst.window(c).end;
        }
        let mut cap_suffix = vec![0; m + 1];
        for k in (0..m).rev() {
            cap_suffix[k] = cap_suffix[k + 1] + caps[k];
        }
        Data { n, caps, block_start, t, start, end, cap_suffix }
    }

    fn t(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.n + 1) + j]
    }

    fn block_end(&self, k: usize) -> usize {
        let mut e = k + 1;
        while e < self.caps.len() && self.block_start[e] == self.block_start[k] {
            e += 1;
        }
        e
    }
}

/// Decoded state of a path of tokens.
#[derive(Clone)]
struct State {
    vehicle: usize,
    last: usize,
    clock: f64,
    count: usize,
    placed: u128,
    fixed: f64,
    /// First customer of the previous vehicle when it shares the open
    /// vehicle's capacity run; `Some(0)` if it stayed empty.
    prev_first: Option<usize>,
    first: usize,
}

impl State {
    fn root() -> State {
        State { vehicle: 0, last: 0, clock: 0.0, count: 0, placed: 0, fixed: 0.0, prev_first: None, first: 0 }
    }

    /// Open vehicle is empty and must stay so because its predecessor in the
    /// same capacity run stayed empty.
    fn frozen(&self) -> bool {
        self.count == 0 && self.prev_first == Some(0)
    }

    fn apply(&mut self, data: &Data, token: u8) {
        if token == CLOSE {
            let k = self.vehicle;
            self.vehicle += 1;
            self.prev_first = if self.vehicle < data.caps.len() && data.block_start[self.vehicle] == data.block_start[k]
            {
                Some(self.first)
            } else {
                None
            };
            self.last = 0;
            self.clock = 0.0;
            self.count = 0;
            self.first = 0;
        } else {
            let j = token as usize;
            let arrival = self.clock + data.t(self.last, j);
            self.clock = arrival.max(data.start[j]);
            self.fixed += self.clock;
            self.placed |= 1u128 << j;
            if self.count == 0 {
                self.first = j;
            }
            self.count += 1;
            self.last = j;
        }
    }

    fn from_path(data: &Data, path: &[u8]) -> State {
        let mut s = State::root();
        for &tok in path {
            s.apply(data, tok);
        }
        s
    }
}

struct Scratch {
    unplaced: Vec<usize>,
    earliest: Vec<f64>,
    done: Vec<bool>,
    slots: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            unplaced: Vec::with_capacity(n),
            earliest: vec![0.0; n + 1],
            done: vec![false; n + 1],
            slots: Vec::new(),
        }
    }
}

/// Lower bound of the node, or `None` when it cannot be completed.
fn bound(data: &Data, s: &State, scratch: &mut Scratch) -> Option<f64> {
    let n = data.n;
    let m = data.caps.len();
    scratch.unplaced.clear();
    scratch.unplaced.extend((1..=n).filter(|&j| s.placed & (1u128 << j) == 0));
    let u = scratch.unplaced.len();
    if u == 0 {
        return Some(s.fixed);
    }
    if s.vehicle >= m {
        return None;
    }
    let k = s.vehicle;
    let open_spare = if s.frozen() { 0 } else { data.caps[k].saturating_sub(s.count) };
    // Vehicles after k that may still be used.
    let later_from = if s.frozen() { data.block_end(k) } else { k + 1 };
    let later_cap = data.cap_suffix[later_from.min(m)];
    if open_spare + later_cap < u {
        return None;
    }

    for &j in &scratch.unplaced {
        let mut e = f64::INFINITY;
        if open_spare > 0 {
            e = e.min(s.clock + data.t(s.last, j));
        }
        if later_cap > 0 {
            e = e.min(data.t(0, j));
        }
        scratch.earliest[j] = e.max(data.start[j]);
        scratch.done[j] = false;
    }
    // Dijkstra over U: labels only grow through max(s_j, .) so settling in
    // increasing order is exact.
    for _ in 0..u {
        let mut best = usize::MAX;
        let mut best_e = f64::INFINITY;
        for &j in &scratch.unplaced {
            if !scratch.done[j] && scratch.earliest[j] < best_e {
                best_e = scratch.earliest[j];
                best = j;
            }
        }
        if best == usize::MAX {
            return None;
        }
        if best_e > data.end[best] + FEASIBILITY_TOL {
            return None;
        }
        scratch.done[best] = true;
        for &j in &scratch.unplaced {
            if !scratch.done[j] {
                let via = (best_e + data.t(best, j)).max(data.start[j]);
                if via < scratch.earliest[j] {
                    scratch.earliest[j] = via;
                }
            }
        }
    }

    let mut delta = f64::INFINITY;
    let mut from_open = f64::INFINITY;
    let mut from_depot = f64::INFINITY;
    for &j in &scratch.unplaced {
        from_open = from_open.min(data.t(s.last, j));
        from_depot = from_depot.min(data.t(0, j));
        for &p in &scratch.unplaced {
            if p != j {
                delta = delta.min(data.t(p, j));
            }
        }
    }
    if !delta.is_finite() {
        delta = 0.0;
    }
    scratch.slots.clear();
    for r in 0..open_spare.min(u) {
        scratch.slots.push(s.clock + from_open + r as f64 * delta);
    }
    for kk in later_from..m {
        for r in 0..data.caps[kk].min(u) {
            scratch.slots.push(from_depot + r as f64 * delta);
        }
    }
    scratch.slots.sort_unstable_by(|a, b| a.total_cmp(b));

    let mut es: Vec<f64> = scratch.unplaced.iter().map(|&j| scratch.earliest[j]).collect();
    es.sort_unstable_by(|a, b| a.total_cmp(b));
    let extra: f64 = es.iter().zip(&scratch.slots).map(|(&e, &slot)| e.max(slot)).sum();
    Some(s.fixed + extra)
}

/// Children tokens of a node in canonical order: close first, then customers ascending.
fn children(data: &Data, s: &State, out: &mut Vec<u8>) {
    out.clear();
    let m = data.caps.len();
    if s.vehicle >= m {
        return;
    }
    let n = data.n;
    let all_placed = s.placed.count_ones() as usize == n;
    if all_placed {
        return;
    }
    if s.vehicle + 1 < m {
        out.push(CLOSE);
    }
    if s.frozen() || s.count >= data.caps[s.vehicle] {
        return;
    }
    let min_first = match (s.count, s.prev_first) {
        (0, Some(f)) => f + 1,
        _ => 1,
    };
    for j in min_first.max(1)..=n {
        if s.placed & (1u128 << j) == 0 {
            out.push(j as u8);
        }
    }
}

#[derive(Debug)]
struct Open {
    bound: f64,
    seq: u64,
    path: Vec<u8>,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    // BinaryHeap is a max-heap: invert so the smallest (bound, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn routes_from_path(path: &[u8]) -> Vec<Route> {
    let mut routes = Vec::new();
    let mut vehicle = 0;
    let mut stops = Vec::new();
    for &tok in path {
        if tok == CLOSE {
            if !stops.is_empty() {
                routes.push(Route::new(vehicle, std::mem::take(&mut stops)));
            }
            vehicle += 1;
        } else {
            stops.push(tok as usize);
        }
    }
    if !stops.is_empty() {
        routes.push(Route::new(vehicle, stops));
    }
    routes
}

struct Search<'a> {
    data: Data,
    model: &'a MilpModel,
    scratch: Scratch,
    incumbent: Option<(f64, Vec<Route>)>,
    nodes: u64,
    seq: u64,
    deadline: Instant,
    timed_out: bool,
    kids: Vec<u8>,
}

impl Search<'_> {
    fn cutoff(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(obj, _)| *obj)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % 256 == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Expands `path`; complete children update the incumbent, the others are
    /// handed to `push` with their bound.
    fn expand(&mut self, path: &[u8], mut push: impl FnMut(f64, Vec<u8>)) {
        let state = State::from_path(&self.data, path);
        let mut kids = std::mem::take(&mut self.kids);
        children(&self.data, &state, &mut kids);
        for &tok in &kids {
            let mut child = state.clone();
            child.apply(&self.data, tok);
            if tok != CLOSE && child.clock > self.data.end[tok as usize] + FEASIBILITY_TOL {
                continue;
            }
            let Some(b) = bound(&self.data, &child, &mut self.scratch) else { continue };
            if b >= self.cutoff() - PRUNE_TOL {
                continue;
            }
            let mut child_path = Vec::with_capacity(path.len() + 1);
            child_path.extend_from_slice(path);
            child_path.push(tok);
            if child.placed.count_ones() as usize == self.data.n {
                self.incumbent = Some((child.fixed, routes_from_path(&child_path)));
            } else {
                push(b, child_path);
            }
        }
        self.kids = kids;
    }

    /// Depth-first exploration of the subtree at `root`; returns the smallest
    /// bound left unexplored if the deadline interrupts it.
    fn dive(&mut self, root: Vec<u8>, root_bound: f64) -> Option<f64> {
        let mut stack = vec![(root_bound, root)];
        while let Some((b, path)) = stack.pop() {
            if b >= self.cutoff() - PRUNE_TOL {
                continue;
            }
            if self.tick() {
                stack.push((b, path));
                return stack.iter().map(|(b, _)| *b).min_by(f64::total_cmp);
            }
            let mut batch = Vec::new();
            self.expand(&path, |cb, cp| batch.push((cb, cp)));
            // Best child on top of the stack.
            batch.sort_by(|a, b| b.0.total_cmp(&a.0));
            stack.extend(batch);
        }
        None
    }
}

pub(super) fn solve(model: &MilpModel, options: &ExactOptions) -> Result<ExactOutcome, ExactError> {
    let started = Instant::now();
    let n = model.instance().n();
    if n > MAX_CUSTOMERS {
        return Err(ExactError::Unsupported { n, max: MAX_CUSTOMERS });
    }
    let data = Data::new(model);
    let mut search = Search {
        scratch: Scratch::new(n),
        data,
        model,
        incumbent: None,
        nodes: 0,
        seq: 0,
        deadline: started + options.time_limit,
        timed_out: false,
        kids: Vec::new(),
    };
    if let Some(warm) = options.warm_start.as_ref().and_then(|w| usable_warm_start(model, w)) {
        search.incumbent = Some((warm.objective, warm.routes));
    }

    let root = State::root();
    let mut open_bound_at_stop: Option<f64> = None;
    match bound(&search.data, &root, &mut search.scratch) {
        None => {}
        Some(b) if n == 0 => {
            search.incumbent = Some((b, Vec::new()));
        }
        Some(root_bound) => {
            let mut heap = BinaryHeap::new();
            heap.push(Open { bound: root_bound, seq: 0, path: Vec::new() });
            while let Some(node) = heap.pop() {
                if node.bound >= search.cutoff() - PRUNE_TOL {
                    // Everything left is dominated.
                    heap.clear();
                    break;
                }
                if heap.len() >= options.max_open_nodes {
                    if let Some(left) = search.dive(node.path, node.bound) {
                        let heap_min = heap.peek().map_or(f64::INFINITY, |o| o.bound);
                        open_bound_at_stop = Some(left.min(heap_min));
                        break;
                    }
                    continue;
                }
                if search.tick() {
                    open_bound_at_stop = Some(node.bound);
                    break;
                }
                let mut fresh = Vec::new();
                search.expand(&node.path, |b, p| fresh.push((b, p)));
                for (b, path) in fresh {
                    search.seq += 1;
                    heap.push(Open { bound: b, seq: search.seq, path });
                }
            }
        }
    }

    let elapsed = started.elapsed();
    let durations = search.model.durations();
    let solution = search.incumbent.take().map(|(_, routes)| {
        let mut sol =
            Solution::from_routes(model.instance(), routes, &durations).expect("search only emits valid customer ids");
        sol.canonicalize();
        debug_assert!(model.check(&model.encode(&sol.routes), 1e-6).is_ok());
        sol
    });
    let (status, lower_bound) = match (&solution, open_bound_at_stop) {
        (Some(sol), None) => (SolveStatus::Optimal, sol.objective),
        (Some(sol), Some(lb)) => (SolveStatus::FeasibleAtLimit, lb.min(sol.objective)),
        (None, None) => (SolveStatus::Infeasible, f64::INFINITY),
        (None, Some(lb)) => (SolveStatus::TimedOut, lb),
    };
    Ok(ExactOutcome { status, solution, lower_bound, nodes: search.nodes, elapsed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::build_model;
    use crate::model::Instance;

    #[test]
    fn root_bound_counts_direct_trips() {
        // Two vehicles, two customers: the bound equals the direct-trip optimum.
        let inst = Instance::builder(2)
            .symmetric(0, 1, 3.0)
            .symmetric(0, 2, 4.0)
            .symmetric(1, 2, 10.0)
            .fleet(vec![1, 1])
            .build()
            .unwrap();
        let model = build_model(&inst, false);
        let data = Data::new(&model);
        let mut scratch = Scratch::new(2);
        assert_eq!(bound(&data, &State::root(), &mut scratch), Some(7.0));
    }

    #[test]
    fn capacity_shortfall_is_infeasible() {
        let inst = Instance::builder(3).fleet(vec![1, 1]).build().unwrap();
        let model = build_model(&inst, false);
        let data = Data::new(&model);
        assert_eq!(bound(&data, &State::root(), &mut Scratch::new(3)), None);
    }

    #[test]
    fn symmetric_vehicles_are_ordered_by_first_customer() {
        let inst = Instance::builder(3).fleet(vec![2, 2]).build().unwrap();
        let data = Data::new(&build_model(&inst, false));
        let s = State::from_path(&data, &[2, CLOSE]);
        let mut kids = Vec::new();
        children(&data, &s, &mut kids);
        assert_eq!(kids, vec![3]);
        // Empty first vehicle freezes the second one of the same capacity.
        let s = State::from_path(&data, &[CLOSE]);
        assert!(s.frozen());
        children(&data, &s, &mut kids);
        assert!(kids.is_empty());
    }

    #[test]
    fn path_round_trip() {
        let routes = routes_from_path(&[3, 1, CLOSE, CLOSE, 2]);
        assert_eq!(routes, vec![Route::new(0, vec![3, 1]), Route::new(2, vec![2])]);
    }
}
