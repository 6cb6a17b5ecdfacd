//! Measured benchmark records: ingestion, derived figures of merit,
//! consistency validation and summary statistics.
//!
//! ```
//! use tierbench::measurements::{throughput_from_latency, Parallelism};
//!
//! // 231.2 MOP in 0.190 ms on one input.
//! let gops = throughput_from_latency(231.2e6, Parallelism::Batch(1), 0.190).unwrap();
//! assert_eq!(format!("{gops:.1}"), "1216.8");
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog::{matches_alias, Catalog, PeakPolicy, PlatformEntry, PlatformKey};
use crate::csvio::{check_header, fmt_opt, read_table, write_table};
use crate::error::{Error, Result};
use crate::finding::{Finding, RecordId, Severity};
use crate::topology::ModelRequirements;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Parallelism {
    Batch(u32),
    Threads(u32),
}

impl Parallelism {
    /// Inputs completed per timed pass. Threads overlap passes rather than
    /// enlarging them, so they count once.
    pub fn count(self) -> u32 {
        match self {
            Parallelism::Batch(b) => b,
            Parallelism::Threads(_) => 1,
        }
    }

    pub fn n(self) -> u32 {
        match self {
            Parallelism::Batch(n) | Parallelism::Threads(n) => n,
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Parallelism::Batch(_) => "batch",
            Parallelism::Threads(_) => "threads",
        }
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Batch(n) => write!(f, "b={n}"),
            Parallelism::Threads(n) => write!(f, "t={n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    System,
    Compute,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::System => "system",
            Scope::Compute => "compute",
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "system" => Ok(Scope::System),
            "compute" => Ok(Scope::Compute),
            _ => Err(Error::invalid(format!("unknown scope `{s}`"))),
        }
    }
}

/// One benchmark observation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub level: u8,
    pub platform: PlatformKey,
    pub model: String,
    /// Layer or layer-block name; levels 1 and 2 only.
    pub layer: Option<String>,
    pub parallelism: Parallelism,
    pub scope: Scope,
    pub latency_ms: f64,
    pub throughput_gops: Option<f64>,
    pub power_watts: Option<f64>,
    pub top1_pct: Option<f64>,
    pub top5_pct: Option<f64>,
    /// Efficiency as published next to the throughput, if any.
    pub reported_efficiency: Option<f64>,
}

/// A value tagged with where it was read from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sourced<T> {
    pub id: RecordId,
    pub value: T,
}

pub type Record = Sourced<MeasurementRecord>;

impl std::ops::Deref for Record {
    type Target = MeasurementRecord;

    fn deref(&self) -> &MeasurementRecord {
        &self.value
    }
}

pub const HEADER: [&str; 14] = [
    "level",
    "platform",
    "mode",
    "datatype",
    "model",
    "layer",
    "parallelism_kind",
    "parallelism_n",
    "scope",
    "latency_ms",
    "throughput_gops",
    "power_watts",
    "top1_pct",
    "top5_pct",
];
const OPTIONAL: [&str; 1] = ["reported_efficiency"];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub record_count: usize,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn new(record_count: usize, mut findings: Vec<Finding>) -> Self {
        findings.sort();
        ValidationReport { record_count, findings }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.record_count += other.record_count;
        self.findings.extend(other.findings);
        self.findings.sort();
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings.iter().filter(|f| f.severity == severity).count()
    }

    pub fn has_failures(&self) -> bool {
        self.count(Severity::Fail) > 0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out.push_str(&format!(
            "{} records, {} warnings, {} failures\n",
            self.record_count,
            self.count(Severity::Warn),
            self.count(Severity::Fail)
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

struct RowReader<'a> {
    id: RecordId,
    findings: &'a mut Vec<Finding>,
}

impl RowReader<'_> {
    fn reject(&mut self, rule: &str, message: String) {
        self.findings.push(Finding::fail(self.id.clone(), rule, message));
    }

    fn number(&mut self, column: &str, raw: &str) -> Option<Option<f64>> {
        if raw.is_empty() {
            return Some(None);
        }
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(Some(v)),
            _ => {
                self.reject("malformed-number", format!("{column}=`{raw}` is not a number"));
                None
            }
        }
    }

    fn nonnegative(&mut self, column: &str, raw: &str) -> Option<Option<f64>> {
        let v = self.number(column, raw)?;
        if v.is_some_and(|v| v < 0.0) {
            self.reject("out-of-range", format!("negative {column}"));
            return None;
        }
        Some(v)
    }

    fn percentage(&mut self, column: &str, raw: &str) -> Option<Option<f64>> {
        let v = self.number(column, raw)?;
        if v.is_some_and(|v| !(0.0..=100.0).contains(&v)) {
            self.reject("out-of-range", format!("{column} outside [0, 100]"));
            return None;
        }
        Some(v)
    }

    fn row(&mut self, f: &[&str]) -> Option<MeasurementRecord> {
        let level = match f[0].parse::<u8>() {
            Ok(l @ 1..=3) => l,
            _ => {
                self.reject("out-of-range", format!("level `{}` not in 1..3", f[0]));
                return None;
            }
        };
        for (col, v) in [("platform", f[1]), ("mode", f[2]), ("datatype", f[3]), ("model", f[4])] {
            if v.is_empty() {
                self.reject("missing-field", format!("empty {col}"));
                return None;
            }
        }
        let n = match f[7].parse::<u32>() {
            Ok(n) if n >= 1 => n,
            _ => {
                self.reject(
                    "out-of-range",
                    format!("parallelism_n `{}` is not a positive integer", f[7]),
                );
                return None;
            }
        };
        let parallelism = match f[6] {
            "batch" => Parallelism::Batch(n),
            "threads" => Parallelism::Threads(n),
            other => {
                self.reject("unknown-value", format!("parallelism_kind `{other}`"));
                return None;
            }
        };
        let Ok(scope) = f[8].parse::<Scope>() else {
            self.reject("unknown-value", format!("scope `{}`", f[8]));
            return None;
        };
        let latency_ms = match self.number("latency_ms", f[9])? {
            Some(l) if l > 0.0 => l,
            Some(_) => {
                self.reject("nonpositive-latency", "nonpositive latency".into());
                return None;
            }
            None => {
                self.reject("missing-field", "empty latency_ms".into());
                return None;
            }
        };
        let throughput_gops = self.nonnegative("throughput_gops", f[10])?;
        let power_watts = self.nonnegative("power_watts", f[11])?;
        let top1_pct = self.percentage("top1_pct", f[12])?;
        let top5_pct = self.percentage("top5_pct", f[13])?;
        let reported_efficiency = self.nonnegative("reported_efficiency", f.get(14).copied().unwrap_or(""))?;
        let layer = (!f[5].is_empty()).then(|| f[5].to_string());
        if level < 3 && layer.is_none() {
            self.reject("missing-layer", format!("level {level} record without a layer"));
            return None;
        }
        if level == 3 && top1_pct.is_none() && top5_pct.is_none() {
            self.reject("missing-accuracy", "level 3 record without accuracy".into());
            return None;
        }
        Some(MeasurementRecord {
            level,
            platform: PlatformKey::new(f[1], f[2], f[3]),
            model: f[4].to_string(),
            layer,
            parallelism,
            scope,
            latency_ms,
            throughput_gops,
            power_watts,
            top1_pct,
            top5_pct,
            reported_efficiency,
        })
    }
}

/// Reads a measurements CSV. `source` names the input in record ids.
///
/// A header that does not match the schema is an error. Problems with
/// individual rows become `fail` findings and those rows are left out.
pub fn ingest_measurements(source: &str, text: &str) -> Result<(Vec<Record>, ValidationReport)> {
    let table = read_table(text)?;
    let width = check_header(&table.header, &HEADER, &OPTIONAL)?;
    let mut records = Vec::with_capacity(table.rows.len());
    let mut findings = Vec::new();
    for (line, row) in &table.rows {
        let id = RecordId::new(source, *line);
        let mut reader = RowReader {
            id: id.clone(),
            findings: &mut findings,
        };
        if row.len() != width {
            reader.reject("malformed-row", format!("expected {width} fields, found {}", row.len()));
            continue;
        }
        let fields: Vec<&str> = row.iter().collect();
        if let Some(value) = reader.row(&fields) {
            records.push(Sourced { id, value });
        }
    }
    let report = ValidationReport::new(records.len(), findings);
    Ok((records, report))
}

/// Writes records in the measurements CSV format, including the
/// `reported_efficiency` column.
pub fn serialize_measurements<'a>(records: impl IntoIterator<Item = &'a MeasurementRecord>) -> String {
    let mut header = HEADER.to_vec();
    header.extend(OPTIONAL);
    write_table(
        &header,
        records.into_iter().map(|r| {
            [
                r.level.to_string(),
                r.platform.platform.clone(),
                r.platform.mode.clone(),
                r.platform.datatype.clone(),
                r.model.clone(),
                r.layer.clone().unwrap_or_default(),
                r.parallelism.kind().to_string(),
                r.parallelism.n().to_string(),
                r.scope.as_str().to_string(),
                r.latency_ms.to_string(),
                fmt_opt(r.throughput_gops),
                fmt_opt(r.power_watts),
                fmt_opt(r.top1_pct),
                fmt_opt(r.top5_pct),
                fmt_opt(r.reported_efficiency),
            ]
        }),
    )
}

/// Records from several inputs, ordered by input name and then by line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementStore {
    records: Vec<Record>,
}

impl MeasurementStore {
    /// Parses `(name, text)` inputs concurrently, one thread per input.
    pub fn from_sources(sources: &[(String, String)]) -> Result<(Self, ValidationReport)> {
        let parsed: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = sources
                .iter()
                .map(|(name, text)| {
                    s.spawn(move || ingest_measurements(name, text).map_err(|e| e.in_file(name.as_str())))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("ingest thread panicked"))
                .collect()
        });
        let mut store = MeasurementStore::default();
        let mut report = ValidationReport::default();
        for result in parsed {
            let (records, r) = result?;
            store.append(records);
            report.merge(r);
        }
        Ok((store, report))
    }

    /// Reads and parses files concurrently.
    pub fn load(paths: &[impl AsRef<Path>]) -> Result<(Self, ValidationReport)> {
        let sources = paths
            .iter()
            .map(|p| {
                let p = p.as_ref();
                std::fs::read_to_string(p)
                    .map(|t| (p.display().to_string(), t))
                    .map_err(|e| Error::Io(format!("{}: {e}", p.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_sources(&sources)
    }

    pub fn append(&mut self, records: Vec<Record>) {
        self.records.extend(records);
        self.records.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn filtered<'a>(&'a self, filters: &'a [RecordFilter]) -> impl Iterator<Item = &'a Record> + 'a {
        self.records
            .iter()
            .filter(move |r| filters.iter().all(|f| f.matches(r)))
    }
}

/// `ops · count / latency`, in GOP/s.
pub fn throughput_from_latency(ops_per_input: f64, parallelism: Parallelism, latency_ms: f64) -> Result<f64> {
    if latency_ms.is_nan() || latency_ms <= 0.0 {
        return Err(Error::invalid(format!("latency must be positive, got {latency_ms} ms")));
    }
    Ok(ops_per_input * f64::from(parallelism.count()) / (latency_ms * 1e6))
}

/// Operations per input implied by a throughput/latency pair.
pub fn implied_ops(throughput_gops: f64, latency_ms: f64, parallelism: Parallelism) -> f64 {
    throughput_gops * latency_ms * 1e6 / f64::from(parallelism.count())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Efficiency {
    pub exact: f64,
}

impl Efficiency {
    /// Rounded to two decimals for display.
    pub fn rounded(self) -> f64 {
        (self.exact * 100.0).round() / 100.0
    }
}

impl fmt::Display for Efficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.exact)
    }
}

/// Fraction of the platform's peak achieved by `measured_gops`.
pub fn efficiency(measured_gops: f64, platform: &PlatformEntry) -> Efficiency {
    Efficiency {
        exact: measured_gops / platform.peak_gops(),
    }
}

/// Default relative tolerance between implied and declared ops.
pub const DEFAULT_THRESHOLD: f64 = 0.02;
/// Allowed gap between recomputed and published efficiency.
pub const EFFICIENCY_TOLERANCE: f64 = 0.01;

/// Numeric consistency of one record.
///
/// `declared_ops` is the work per input from the topology, and `reference`
/// the catalog row whose peak is the efficiency denominator. Either may be
/// missing, which is reported as an unknown reference.
pub fn consistency_check(
    record: &Record,
    declared_ops: Option<u64>,
    reference: Option<&PlatformEntry>,
    threshold: f64,
) -> Vec<Finding> {
    let mut out = Vec::new();
    let id = &record.id;
    let r = &record.value;
    let target = match &r.layer {
        Some(layer) => format!("{}/{}", r.model, layer),
        None => r.model.clone(),
    };
    match (declared_ops, r.throughput_gops) {
        (None, _) => out.push(Finding::warn(
            id.clone(),
            "unknown-reference",
            format!("no topology for `{target}`"),
        )),
        (Some(declared), Some(thr)) => {
            let implied = implied_ops(thr, r.latency_ms, r.parallelism);
            let deviation = (implied - declared as f64) / declared as f64;
            if deviation.abs() > threshold {
                out.push(Finding::warn(
                    id.clone(),
                    "ops-mismatch",
                    format!(
                        "{thr} GOP/s x {} ms / {} implies {:.4} GOP per input, declared {:.4} GOP ({:+.1}%)",
                        r.latency_ms,
                        r.parallelism.count(),
                        implied / 1e9,
                        declared as f64 / 1e9,
                        deviation * 100.0
                    ),
                ));
            }
        }
        (Some(_), None) => {}
    }
    let Some(peak) = reference else {
        out.push(Finding::warn(
            id.clone(),
            "unknown-reference",
            format!("no catalog row for `{}`", r.platform),
        ));
        return out;
    };
    let measured = r
        .throughput_gops
        .or_else(|| declared_ops.and_then(|ops| throughput_from_latency(ops as f64, r.parallelism, r.latency_ms).ok()));
    if let Some(measured) = measured {
        let eff = efficiency(measured, peak);
        if eff.exact > 1.0 {
            out.push(Finding::fail(
                id.clone(),
                "efficiency-exceeds-peak",
                format!("{measured} GOP/s exceeds the {} GOP/s peak", peak.peak_gops()),
            ));
        }
        if let Some(reported) = r.reported_efficiency {
            if (eff.exact - reported).abs() > EFFICIENCY_TOLERANCE + 1e-9 {
                out.push(Finding::warn(
                    id.clone(),
                    "efficiency-mismatch",
                    format!(
                        "recomputed {eff} against the {} peak of {} TOP/s, published {reported}",
                        peak.key(),
                        peak.peak_tops
                    ),
                ));
            }
        }
    }
    out
}

/// Topology requirements looked up by model name, ignoring ASCII case.
#[derive(Clone, Debug, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, ModelRequirements>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, req: ModelRequirements) {
        self.models.insert(name.to_ascii_lowercase(), req);
    }

    pub fn get(&self, name: &str) -> Option<&ModelRequirements> {
        self.models.get(&name.to_ascii_lowercase())
    }

    /// Ops per input of a whole model, or of one of its layers or blocks.
    pub fn ops_for(&self, model: &str, layer: Option<&str>) -> Option<u64> {
        let req = self.get(model)?;
        match layer {
            None => Some(req.o_total),
            Some(layer) => req.layer_ops(layer),
        }
    }
}

/// Runs [`consistency_check`] over records.
pub struct Validator<'a> {
    pub catalog: &'a Catalog,
    pub models: &'a ModelRegistry,
    pub threshold: f64,
    pub peaks: PeakPolicy,
}

impl<'a> Validator<'a> {
    pub fn new(catalog: &'a Catalog, models: &'a ModelRegistry) -> Self {
        Validator {
            catalog,
            models,
            threshold: DEFAULT_THRESHOLD,
            peaks: PeakPolicy::own_key(),
        }
    }

    pub fn check(&self, record: &Record) -> Vec<Finding> {
        let declared = self.models.ops_for(&record.model, record.layer.as_deref());
        let reference = self.peaks.reference(self.catalog, &record.platform);
        consistency_check(record, declared, reference, self.threshold)
    }

    pub fn validate<'r>(&self, records: impl IntoIterator<Item = &'r Record>) -> ValidationReport {
        let mut count = 0;
        let mut findings = Vec::new();
        for r in records {
            count += 1;
            findings.extend(self.check(r));
        }
        ValidationReport::new(count, findings)
    }

    /// Recomputed efficiency of a record against its reference peak.
    pub fn efficiency(&self, record: &MeasurementRecord) -> Option<Efficiency> {
        let peak = self.peaks.reference(self.catalog, &record.platform)?;
        Some(efficiency(record.throughput_gops?, peak))
    }
}

/// Numeric record fields available to statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsField {
    LatencyMs,
    ThroughputGops,
    PowerWatts,
    Top1Pct,
    Top5Pct,
}

impl StatsField {
    pub const ALL: [StatsField; 5] = [
        StatsField::LatencyMs,
        StatsField::ThroughputGops,
        StatsField::PowerWatts,
        StatsField::Top1Pct,
        StatsField::Top5Pct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatsField::LatencyMs => "latency_ms",
            StatsField::ThroughputGops => "throughput_gops",
            StatsField::PowerWatts => "power_watts",
            StatsField::Top1Pct => "top1_pct",
            StatsField::Top5Pct => "top5_pct",
        }
    }

    pub fn get(self, r: &MeasurementRecord) -> Option<f64> {
        match self {
            StatsField::LatencyMs => Some(r.latency_ms),
            StatsField::ThroughputGops => r.throughput_gops,
            StatsField::PowerWatts => r.power_watts,
            StatsField::Top1Pct => r.top1_pct,
            StatsField::Top5Pct => r.top5_pct,
        }
    }
}

impl FromStr for StatsField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        StatsField::ALL
            .into_iter()
            .find(|f| f.name() == s || f.name().split('_').next() == Some(s.as_str()))
            .ok_or_else(|| Error::invalid(format!("unknown field `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatsSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Unbiased sample variance (divides by n - 1); 0 for one value.
    pub variance: f64,
    /// Population variance (divides by n).
    pub population_variance: f64,
}

/// Summary statistics of one field, computed in two passes.
pub fn summarize(values: &[f64]) -> Result<StatsSummary> {
    if values.is_empty() {
        return Err(Error::invalid("statistics over an empty set"));
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (values.iter().sum::<f64>() / n).clamp(min, max);
    let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
    Ok(StatsSummary {
        count: values.len(),
        min,
        max,
        mean,
        variance: if values.len() > 1 { ss / (n - 1.0) } else { 0.0 },
        population_variance: ss / n,
    })
}

pub fn aggregate_stats<'a>(records: impl IntoIterator<Item = &'a Record>, field: StatsField) -> Result<StatsSummary> {
    let values = records
        .into_iter()
        .map(|r| {
            field.get(r).ok_or_else(|| Error::MissingField {
                record: r.id.to_string(),
                field: field.name().to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(&values)
}

/// A `key=value` condition on record fields.
///
/// String fields compare case-insensitively, a trailing `*` matches any
/// suffix and `|` separates alternatives. `platform` also accepts aliases
/// such as `tx2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordFilter {
    key: FilterKey,
    value: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FilterKey {
    Level,
    Platform,
    Mode,
    Datatype,
    Model,
    Layer,
    ParallelismKind,
    ParallelismN,
    Scope,
}

const FILTER_KEYS: [(&str, FilterKey); 9] = [
    ("level", FilterKey::Level),
    ("platform", FilterKey::Platform),
    ("mode", FilterKey::Mode),
    ("datatype", FilterKey::Datatype),
    ("model", FilterKey::Model),
    ("layer", FilterKey::Layer),
    ("parallelism_kind", FilterKey::ParallelismKind),
    ("parallelism_n", FilterKey::ParallelismN),
    ("scope", FilterKey::Scope),
];

impl FromStr for RecordFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("filter `{s}` is not key=value")))?;
        let key = FILTER_KEYS
            .iter()
            .find(|(name, _)| *name == k.trim())
            .map(|(_, key)| *key)
            .ok_or_else(|| {
                let names: Vec<_> = FILTER_KEYS.iter().map(|(n, _)| *n).collect();
                Error::invalid(format!("unknown filter key `{k}` (one of {})", names.join(", ")))
            })?;
        Ok(RecordFilter {
            key,
            value: v.trim().to_string(),
        })
    }
}

fn text_matches(actual: &str, pattern: &str) -> bool {
    pattern.split('|').any(|alt| match alt.strip_suffix('*') {
        Some(prefix) => actual.to_ascii_lowercase().starts_with(&prefix.to_ascii_lowercase()),
        None => actual.eq_ignore_ascii_case(alt),
    })
}

impl RecordFilter {
    pub fn matches(&self, r: &MeasurementRecord) -> bool {
        let v = self.value.as_str();
        match self.key {
            FilterKey::Level => r.level.to_string() == v,
            FilterKey::Platform => {
                text_matches(&r.platform.platform, v)
                    || v.split('|').any(|alt| matches_alias(&r.platform.platform, alt))
            }
            FilterKey::Mode => text_matches(&r.platform.mode, v),
            FilterKey::Datatype => text_matches(&r.platform.datatype, v),
            FilterKey::Model => text_matches(&r.model, v),
            FilterKey::Layer => r.layer.as_deref().is_some_and(|l| text_matches(l, v)),
            FilterKey::ParallelismKind => r.parallelism.kind() == v,
            FilterKey::ParallelismN => r.parallelism.n().to_string() == v,
            FilterKey::Scope => r.scope.as_str() == v,
        }
    }
}
