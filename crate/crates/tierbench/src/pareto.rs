//! Pareto frontiers over measurement records.
//!
//! A record dominates another when it is at least as good in every objective
//! and strictly better in one. The frontier is the set of records no other
//! record dominates.
//!
//! ```
//! use tierbench::pareto::frontier_indices;
//!
//! // Two objectives, both maximized.
//! let points = vec![vec![1.0, 5.0], vec![2.0, 4.0], vec![1.0, 4.0]];
//! assert_eq!(frontier_indices(&points), vec![1, 0]);
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog::{Catalog, PeakPolicy};
use crate::csvio::write_table;
use crate::error::{Error, Result};
use crate::finding::Finding;
use crate::measurements::{efficiency, Record};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveField {
    Top1,
    Top5,
    Throughput,
    Latency,
    Power,
    Efficiency,
}

impl ObjectiveField {
    pub const ALL: [ObjectiveField; 6] = [
        ObjectiveField::Top1,
        ObjectiveField::Top5,
        ObjectiveField::Throughput,
        ObjectiveField::Latency,
        ObjectiveField::Power,
        ObjectiveField::Efficiency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveField::Top1 => "top1",
            ObjectiveField::Top5 => "top5",
            ObjectiveField::Throughput => "throughput",
            ObjectiveField::Latency => "latency",
            ObjectiveField::Power => "power",
            ObjectiveField::Efficiency => "efficiency",
        }
    }
}

impl fmt::Display for ObjectiveField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.replace('-', "");
        let alias = match s.as_str() {
            "top1_pct" => "top1",
            "top5_pct" => "top5",
            "throughput_gops" => "throughput",
            "latency_ms" => "latency",
            "power_watts" => "power",
            other => other,
        };
        ObjectiveField::ALL
            .into_iter()
            .find(|f| f.name() == alias)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown objective field `{s}` (top1, top5, throughput, latency, power, efficiency)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Objective {
    pub field: ObjectiveField,
    pub direction: Direction,
}

impl Objective {
    pub fn max(field: ObjectiveField) -> Self {
        Objective {
            field,
            direction: Direction::Maximize,
        }
    }

    pub fn min(field: ObjectiveField) -> Self {
        Objective {
            field,
            direction: Direction::Minimize,
        }
    }

    fn adjust(self, v: f64) -> f64 {
        match self.direction {
            Direction::Maximize => v,
            Direction::Minimize => -v,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Maximize => "max",
            Direction::Minimize => "min",
        };
        write!(f, "{}:{d}", self.field)
    }
}

/// Parses `field:max` or `field:min`.
impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (field, dir) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::invalid(format!("objective `{s}` is not field:max|min")))?;
        let direction = match dir.trim() {
            "max" => Direction::Maximize,
            "min" => Direction::Minimize,
            other => return Err(Error::invalid(format!("direction `{other}` is not max or min"))),
        };
        Ok(Objective {
            field: field.parse()?,
            direction,
        })
    }
}

fn check_objectives(objectives: &[Objective]) -> Result<()> {
    if objectives.len() < 2 {
        return Err(Error::invalid("a pareto query needs at least two objectives"));
    }
    for (i, o) in objectives.iter().enumerate() {
        if objectives[..i].iter().any(|p| p.field == o.field) {
            return Err(Error::invalid(format!("objective field `{}` given twice", o.field)));
        }
    }
    Ok(())
}

/// Reads objective values from records. Efficiency needs a catalog to divide
/// by; without one it reads as missing.
#[derive(Clone, Copy, Debug, Default)]
pub struct FieldReader<'a> {
    peaks: Option<(&'a Catalog, &'a PeakPolicy)>,
}

impl<'a> FieldReader<'a> {
    pub fn plain() -> Self {
        Self::default()
    }

    pub fn with_catalog(catalog: &'a Catalog, policy: &'a PeakPolicy) -> Self {
        FieldReader {
            peaks: Some((catalog, policy)),
        }
    }

    pub fn read(&self, r: &Record, field: ObjectiveField) -> Option<f64> {
        match field {
            ObjectiveField::Top1 => r.top1_pct,
            ObjectiveField::Top5 => r.top5_pct,
            ObjectiveField::Throughput => r.throughput_gops,
            ObjectiveField::Latency => Some(r.latency_ms),
            ObjectiveField::Power => r.power_watts,
            ObjectiveField::Efficiency => {
                let (catalog, policy) = self.peaks?;
                let peak = policy.reference(catalog, &r.platform)?;
                Some(efficiency(r.throughput_gops?, peak).exact)
            }
        }
    }

    fn adjusted(&self, r: &Record, objectives: &[Objective]) -> Result<Vec<f64>> {
        objectives
            .iter()
            .map(|o| {
                self.read(r, o.field)
                    .filter(|v| !v.is_nan())
                    .map(|v| o.adjust(v))
                    .ok_or_else(|| Error::MissingField {
                        record: r.id.to_string(),
                        field: o.field.name().to_string(),
                    })
            })
            .collect()
    }
}

/// Dominance on direction-adjusted values, where larger is better.
pub fn dominates_values(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        strictly |= x > y;
    }
    strictly
}

pub fn dominates(a: &Record, b: &Record, objectives: &[Objective], reader: &FieldReader) -> Result<bool> {
    let va = reader.adjusted(a, objectives)?;
    let vb = reader.adjusted(b, objectives)?;
    Ok(dominates_values(&va, &vb))
}

fn lexicographic_desc(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| y.partial_cmp(x).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Non-dominated points of `points` (all objectives maximized, no NaN), ordered by
/// descending values with ties in index order.
///
/// Points are visited in descending lexicographic order, so every dominator of
/// a point is visited before it. A point then only has to be compared with the
/// frontier found so far, because dominance is transitive.
pub fn frontier_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lexicographic_desc(&points[i], &points[j]).then(i.cmp(&j)));
    let mut frontier: Vec<usize> = Vec::new();
    for i in order {
        if !frontier.iter().any(|&f| dominates_values(&points[f], &points[i])) {
            frontier.push(i);
        }
    }
    frontier
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoResult {
    /// Indices into the queried records, best first objective first.
    pub frontier: Vec<usize>,
    pub dominated_count: usize,
    /// Records left out because they lack an objective field.
    pub excluded: Vec<Finding>,
}

impl ParetoResult {
    pub fn contains(&self, index: usize) -> bool {
        self.frontier.contains(&index)
    }
}

pub fn pareto_frontier(records: &[Record], objectives: &[Objective], reader: &FieldReader) -> Result<ParetoResult> {
    check_objectives(objectives)?;
    if records.is_empty() {
        return Err(Error::invalid("pareto query over no records"));
    }
    let mut included = Vec::with_capacity(records.len());
    let mut points = Vec::with_capacity(records.len());
    let mut excluded = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match reader.adjusted(r, objectives) {
            Ok(v) => {
                included.push(i);
                points.push(v);
            }
            Err(e) => excluded.push(Finding::warn(r.id.clone(), "missing-objective", e.to_string())),
        }
    }
    let frontier: Vec<usize> = frontier_indices(&points).into_iter().map(|k| included[k]).collect();
    Ok(ParetoResult {
        dominated_count: included.len() - frontier.len(),
        frontier,
        excluded,
    })
}

fn record_columns(r: &Record) -> [String; 9] {
    [
        r.id.source.clone(),
        r.id.line.to_string(),
        r.level.to_string(),
        r.platform.platform.clone(),
        r.platform.mode.clone(),
        r.platform.datatype.clone(),
        r.model.clone(),
        r.parallelism.to_string(),
        r.scope.as_str().to_string(),
    ]
}

const RECORD_HEADER: [&str; 9] = [
    "source",
    "line",
    "level",
    "platform",
    "mode",
    "datatype",
    "model",
    "parallelism",
    "scope",
];

fn render(
    records: &[Record],
    rows: impl Iterator<Item = usize>,
    objectives: &[Objective],
    reader: &FieldReader,
    flag: Option<&ParetoResult>,
    exact: bool,
) -> String {
    let mut header: Vec<&str> = RECORD_HEADER.to_vec();
    header.extend(objectives.iter().map(|o| o.field.name()));
    if flag.is_some() {
        header.push("frontier");
    }
    write_table(
        &header,
        rows.map(|i| {
            let r = &records[i];
            let mut row: Vec<String> = record_columns(r).into();
            for o in objectives {
                let v = reader.read(r, o.field).unwrap_or(f64::NAN);
                row.push(if exact { v.to_string() } else { format!("{v:.2}") });
            }
            if let Some(result) = flag {
                row.push(if result.contains(i) { "1" } else { "0" }.to_string());
            }
            row
        }),
    )
}

/// The frontier records, in frontier order.
pub fn frontier_csv(
    records: &[Record],
    result: &ParetoResult,
    objectives: &[Objective],
    reader: &FieldReader,
    exact: bool,
) -> String {
    render(
        records,
        result.frontier.iter().copied(),
        objectives,
        reader,
        None,
        exact,
    )
}

/// Every record that carries all objectives, in input order, with a
/// `frontier` column of 1 or 0.
pub fn scatter_csv(
    records: &[Record],
    result: &ParetoResult,
    objectives: &[Objective],
    reader: &FieldReader,
    exact: bool,
) -> String {
    let excluded: Vec<_> = result.excluded.iter().map(|f| &f.record).collect();
    let rows = (0..records.len()).filter(|i| !excluded.contains(&&records[*i].id));
    render(records, rows, objectives, reader, Some(result), exact)
}
