//! Solomon-layout VRPTW text files.
//!
//! Accepted layout: optional name and header lines, an optional fleet line
//! with two integers (vehicle number, capacity), then node rows
//! `id x y demand ready_time due_date service_time`. The row with id `0` is
//! the depot (the first row, for files numbered from 1); the remaining rows
//! become customers `1..=n` in file order. A row with id `999` ends the data
//! (Dumas-style terminator).
//!
//! Travel times are Euclidean distances between coordinates, one distance unit
//! per second, kept at full precision.

use std::collections::HashSet;
use std::fmt;

use crate::error::ModelError;
use crate::model::{Instance, Point};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MalformedRow(String),
    DuplicateId(u64),
    MissingDepot,
    InvalidWindow { id: u64, ready: f64, due: f64 },
    Model(ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based line number; 0 when the error concerns the whole file.
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::MalformedRow(s) => write!(f, "line {}: malformed row: {s}", self.line),
            ParseErrorKind::DuplicateId(id) => write!(f, "line {}: duplicate node id {id}", self.line),
            ParseErrorKind::MissingDepot => write!(f, "line {}: no depot row (id 0)", self.line),
            ParseErrorKind::InvalidWindow { id, ready, due } => {
                write!(f, "line {}: node {id} has due date {due} before ready time {ready}", self.line)
            }
            ParseErrorKind::Model(e) => write!(f, "line {}: {e}", self.line),
        }
    }
}

impl std::error::Error for ParseError {}

/// Fleet overrides applied after parsing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolomonOptions {
    pub vehicles: Option<usize>,
    pub capacity: Option<u32>,
    pub epsilon: f64,
}

impl SolomonOptions {
    /// `|K|` vehicles of capacity `c` each, as used for the RC2 study.
    pub fn fleet(vehicles: usize, capacity: u32) -> Self {
        SolomonOptions { vehicles: Some(vehicles), capacity: Some(capacity), epsilon: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRow {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
    pub line: usize,
}

fn numbers(line: &str) -> Option<Vec<f64>> {
    line.split_whitespace().map(|t| t.parse::<f64>().ok()).collect()
}

/// Parses with the fleet taken from the file header (or one vehicle able to
/// serve every customer when the header is absent).
pub fn parse_solomon(text: &str) -> Result<Instance, ParseError> {
    parse_solomon_with(text, &SolomonOptions::default())
}

pub fn parse_solomon_with(text: &str, options: &SolomonOptions) -> Result<Instance, ParseError> {
    let mut name = None;
    let mut fleet_header: Option<(usize, u32)> = None;
    let mut rows: Vec<NodeRow> = Vec::new();
    let mut expect_fleet = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some(nums) = numbers(line) else {
            if !rows.is_empty() {
                return Err(ParseError { line: line_no, kind: ParseErrorKind::MalformedRow(line.to_string()) });
            }
            if line.to_ascii_uppercase().contains("VEHICLE") {
                expect_fleet = true;
            } else if name.is_none() && !line.contains(char::is_whitespace) {
                name = Some(line.to_string());
            }
            continue;
        };
        if rows.is_empty() && nums.len() == 2 && (expect_fleet || fleet_header.is_none()) {
            if nums[0] < 0.0 || nums[1] < 0.0 || nums[0].fract() != 0.0 || nums[1].fract() != 0.0 {
                return Err(ParseError { line: line_no, kind: ParseErrorKind::MalformedRow(line.to_string()) });
            }
            fleet_header = Some((nums[0] as usize, nums[1] as u32));
            expect_fleet = false;
            continue;
        }
        if nums.len() != 7 || nums[0] < 0.0 || nums[0].fract() != 0.0 || nums.iter().any(|v| !v.is_finite()) {
            return Err(ParseError { line: line_no, kind: ParseErrorKind::MalformedRow(line.to_string()) });
        }
        let id = nums[0] as u64;
        if id == 999 {
            break;
        }
        let row = NodeRow {
            id,
            x: nums[1],
            y: nums[2],
            demand: nums[3],
            ready: nums[4],
            due: nums[5],
            service: nums[6],
            line: line_no,
        };
        if row.due < row.ready {
            return Err(ParseError {
                line: line_no,
                kind: ParseErrorKind::InvalidWindow { id, ready: row.ready, due: row.due },
            });
        }
        if row.service < 0.0 {
            return Err(ParseError { line: line_no, kind: ParseErrorKind::MalformedRow(line.to_string()) });
        }
        rows.push(row);
    }

    let mut seen = HashSet::new();
    for r in &rows {
        if !seen.insert(r.id) {
            return Err(ParseError { line: r.line, kind: ParseErrorKind::DuplicateId(r.id) });
        }
    }
    let Some(depot_idx) = rows.iter().position(|r| r.id == 0).or_else(|| one_based_depot(&rows)) else {
        let line = rows.first().map_or(0, |r| r.line);
        return Err(ParseError { line, kind: ParseErrorKind::MissingDepot });
    };
    let depot = rows.remove(depot_idx);
    let n = rows.len();

    let mut coords = Vec::with_capacity(n + 1);
    coords.push(Point::new(depot.x, depot.y));
    coords.extend(rows.iter().map(|r| Point::new(r.x, r.y)));

    let (vehicles, capacity) = match fleet_header {
        Some((v, c)) => (options.vehicles.unwrap_or(v), options.capacity.unwrap_or(c)),
        None => (options.vehicles.unwrap_or(1), options.capacity.unwrap_or(n.max(1) as u32)),
    };
    let mut builder = Instance::builder(n)
        .name(name.unwrap_or_else(|| "solomon".to_string()))
        .euclidean(coords)
        .epsilon(options.epsilon)
        .service(0, depot.service)
        .fleet(vec![capacity; vehicles.max(1)]);
    for (i, r) in rows.iter().enumerate() {
        builder = builder.window(i + 1, r.ready, r.due).service(i + 1, r.service);
    }
    builder.build().map_err(|e| ParseError { line: 0, kind: ParseErrorKind::Model(e) })
}

/// Files numbered from 1 (ids exactly `1..=N`, first row id 1 with zero
/// demand) keep the depot in the first row.
fn one_based_depot(rows: &[NodeRow]) -> Option<usize> {
    let first = rows.first()?;
    let mut ids: Vec<u64> = rows.iter().map(|r| r.id).collect();
    ids.sort_unstable();
    let contiguous = ids.iter().zip(1u64..).all(|(&id, want)| id == want);
    (first.id == 1 && first.demand == 0.0 && contiguous).then_some(0)
}

/// Parses the matrix layout used by several TSPTW benchmark collections:
/// the node count `N`, an `N x N` travel-time matrix, then `N` lines of
/// `ready due`. Node 0 is the depot.
pub fn parse_tsptw_matrix(text: &str, options: &SolomonOptions) -> Result<Instance, ParseError> {
    let mut tokens = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for t in line.split_whitespace() {
            let v: f64 = t.parse().map_err(|_| ParseError {
                line: idx + 1,
                kind: ParseErrorKind::MalformedRow(line.trim().to_string()),
            })?;
            tokens.push((v, idx + 1));
        }
    }
    let malformed = |line: usize, what: &str| ParseError { line, kind: ParseErrorKind::MalformedRow(what.to_string()) };
    let Some(&(count, line)) = tokens.first() else {
        return Err(ParseError { line: 0, kind: ParseErrorKind::MissingDepot });
    };
    if count < 1.0 || count.fract() != 0.0 {
        return Err(malformed(line, "node count"));
    }
    let size = count as usize;
    let need = 1 + size * size + 2 * size;
    if tokens.len() != need {
        let line = tokens.last().map_or(0, |t| t.1);
        return Err(malformed(line, &format!("expected {need} numbers, found {}", tokens.len())));
    }
    let n = size - 1;
    let matrix: Vec<Vec<f64>> = (0..size).map(|i| (0..size).map(|j| tokens[1 + i * size + j].0).collect()).collect();
    let vehicles = options.vehicles.unwrap_or(1);
    let capacity = options.capacity.unwrap_or(n.max(1) as u32);
    let mut builder = Instance::builder(n)
        .name("tsptw")
        .nominal_matrix(matrix)
        .epsilon(options.epsilon)
        .fleet(vec![capacity; vehicles.max(1)]);
    let base = 1 + size * size;
    for i in 1..size {
        let (ready, line) = tokens[base + 2 * i];
        let due = tokens[base + 2 * i + 1].0;
        if due < ready {
            return Err(ParseError { line, kind: ParseErrorKind::InvalidWindow { id: i as u64, ready, due } });
        }
        builder = builder.window(i, ready, due);
    }
    builder.build().map_err(|e| ParseError { line: 0, kind: ParseErrorKind::Model(e) })
}

/// Solomon layout when the text has node rows, matrix layout otherwise.
pub fn parse_benchmark(text: &str, options: &SolomonOptions) -> Result<Instance, ParseError> {
    let first_numeric = text.lines().map(str::trim).find(|l| !l.is_empty()).and_then(numbers);
    match first_numeric {
        Some(nums) if nums.len() == 1 => parse_tsptw_matrix(text, options),
        _ => parse_solomon_with(text, options),
    }
}
