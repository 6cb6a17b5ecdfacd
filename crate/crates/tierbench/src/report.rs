//! Multi-level summary reports.
//!
//! A report has three sections: roofline predictions (level 0), latency
//! statistics per configuration (levels 1 and 2) and the pareto frontier of
//! system-level application runs (level 3). Sections without input say so
//! explicitly. Output is a deterministic function of the input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::csvio::write_table;
use crate::error::{Error, Result};
use crate::measurements::Scope;
use crate::measurements::{aggregate_stats, Record, StatsField, StatsSummary};
use crate::pareto::{frontier_csv, pareto_frontier, scatter_csv, FieldReader, Objective, ObjectiveField, ParetoResult};
use crate::roofline::{prediction_csv, PredictionRow};

pub const NO_DATA: &str = "no data";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub struct ReportInput<'a> {
    pub predictions: &'a [PredictionRow],
    pub records: &'a [Record],
    pub objectives: Vec<Objective>,
    pub reader: FieldReader<'a>,
    pub exact: bool,
}

impl<'a> ReportInput<'a> {
    /// Frontier objectives default to top-5 accuracy and throughput, both
    /// maximized.
    pub fn new(predictions: &'a [PredictionRow], records: &'a [Record]) -> Self {
        ReportInput {
            predictions,
            records,
            objectives: vec![
                Objective::max(ObjectiveField::Top5),
                Objective::max(ObjectiveField::Throughput),
            ],
            reader: FieldReader::plain(),
            exact: false,
        }
    }
}

/// Named output files of a rendered report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub files: Vec<(String, String)>,
}

impl Report {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
struct GroupKey {
    level: u8,
    platform: String,
    mode: String,
    datatype: String,
    model: String,
    parallelism: String,
    scope: &'static str,
}

#[derive(Serialize)]
struct StatsRow {
    #[serde(flatten)]
    key: GroupKey,
    latency_ms: StatsSummary,
}

fn stats_rows(records: &[Record]) -> Result<Vec<StatsRow>> {
    let mut groups: BTreeMap<GroupKey, Vec<&Record>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.level == 1 || r.level == 2) {
        let key = GroupKey {
            level: r.level,
            platform: r.platform.platform.clone(),
            mode: r.platform.mode.clone(),
            datatype: r.platform.datatype.clone(),
            model: r.model.clone(),
            parallelism: r.parallelism.to_string(),
            scope: r.scope.as_str(),
        };
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            Ok(StatsRow {
                key,
                latency_ms: aggregate_stats(rs, StatsField::LatencyMs)?,
            })
        })
        .collect()
}

struct Level3 {
    records: Vec<Record>,
    result: Option<ParetoResult>,
}

fn level3(input: &ReportInput) -> Result<Level3> {
    let records: Vec<Record> = input
        .records
        .iter()
        .filter(|r| r.level == 3 && r.scope == Scope::System)
        .cloned()
        .collect();
    let result = if records.is_empty() {
        None
    } else {
        Some(pareto_frontier(&records, &input.objectives, &input.reader)?)
    };
    Ok(Level3 { records, result })
}

fn num(v: f64, exact: bool) -> String {
    if exact {
        v.to_string()
    } else {
        format!("{v:.2}")
    }
}

const STATS_HEADER: [&str; 13] = [
    "level",
    "platform",
    "mode",
    "datatype",
    "model",
    "parallelism",
    "scope",
    "count",
    "latency_min_ms",
    "latency_max_ms",
    "latency_mean_ms",
    "latency_var",
    "latency_pop_var",
];

fn stats_csv(rows: &[StatsRow], exact: bool) -> String {
    write_table(
        &STATS_HEADER,
        rows.iter().map(|r| {
            let s = &r.latency_ms;
            [
                r.key.level.to_string(),
                r.key.platform.clone(),
                r.key.mode.clone(),
                r.key.datatype.clone(),
                r.key.model.clone(),
                r.key.parallelism.clone(),
                r.key.scope.to_string(),
                s.count.to_string(),
                num(s.min, exact),
                num(s.max, exact),
                num(s.mean, exact),
                num(s.variance, exact),
                num(s.population_variance, exact),
            ]
        }),
    )
}

fn no_data_csv(header: &str) -> String {
    format!("# {NO_DATA}\n{header}\n")
}

/// Renders the report in `format`. Every format also produces
/// `pareto_scatter.csv`, one row per level-3 system record with a
/// `frontier` flag.
pub fn render_report(input: &ReportInput, format: Format) -> Result<Report> {
    if input.predictions.is_empty() && input.records.is_empty() {
        return Err(Error::invalid("nothing to report"));
    }
    let stats = stats_rows(input.records)?;
    let l3 = level3(input)?;
    let exact = input.exact;
    let objective_header = {
        let mut h = "source,line,level,platform,mode,datatype,model,parallelism,scope".to_string();
        for o in &input.objectives {
            h.push(',');
            h.push_str(o.field.name());
        }
        h
    };
    let scatter = match &l3.result {
        Some(r) => scatter_csv(&l3.records, r, &input.objectives, &input.reader, exact),
        None => no_data_csv(&format!("{objective_header},frontier")),
    };
    let frontier = match &l3.result {
        Some(r) => frontier_csv(&l3.records, r, &input.objectives, &input.reader, exact),
        None => no_data_csv(&objective_header),
    };
    let mut files = Vec::new();
    match format {
        Format::Csv => {
            files.push((
                "level0_predictions.csv".to_string(),
                if input.predictions.is_empty() {
                    no_data_csv(&crate::roofline::PREDICTION_HEADER.join(","))
                } else {
                    prediction_csv(input.predictions, exact)
                },
            ));
            files.push((
                "level12_stats.csv".to_string(),
                if stats.is_empty() {
                    no_data_csv(&STATS_HEADER.join(","))
                } else {
                    stats_csv(&stats, exact)
                },
            ));
            files.push(("level3_frontier.csv".to_string(), frontier));
        }
        Format::Text => files.push(("report.txt".to_string(), text(input, &stats, &l3))),
        Format::Json => {
            let section = |v: Value, empty: bool| if empty { json!(NO_DATA) } else { v };
            let l3_value = match &l3.result {
                None => json!(NO_DATA),
                Some(r) => json!({
                    "objectives": input.objectives.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                    "frontier": r.frontier.iter().map(|&i| &l3.records[i]).collect::<Vec<_>>(),
                    "dominated_count": r.dominated_count,
                    "excluded": r.excluded,
                }),
            };
            let doc = json!({
                "level0": section(json!(input.predictions), input.predictions.is_empty()),
                "level1_2": section(json!(stats), stats.is_empty()),
                "level3": l3_value,
            });
            let body = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
            files.push(("report.json".to_string(), body));
        }
    }
    files.push(("pareto_scatter.csv".to_string(), scatter));
    Ok(Report { files })
}

fn text(input: &ReportInput, stats: &[StatsRow], l3: &Level3) -> String {
    let exact = input.exact;
    let mut out = String::new();
    out.push_str("== Level 0: roofline predictions ==\n");
    if input.predictions.is_empty() {
        let _ = writeln!(out, "{NO_DATA}");
    }
    for p in input.predictions {
        let attainable = p
            .prediction
            .as_ref()
            .map_or("-".to_string(), |x| num(x.attainable_gops, exact));
        let _ = writeln!(
            out,
            "{} | {} {} {} | b={} | AI {} OP/B | {} GOP/s | {}",
            p.model,
            p.platform,
            p.mode,
            p.datatype,
            p.batch,
            num(p.ai, exact),
            attainable,
            p.bound_label()
        );
    }
    out.push_str("\n== Levels 1-2: latency statistics ==\n");
    if stats.is_empty() {
        let _ = writeln!(out, "{NO_DATA}");
    }
    for s in stats {
        let k = &s.key;
        let l = &s.latency_ms;
        let _ = writeln!(
            out,
            "L{} {} {} {} {} {} {} | n={} min {} max {} mean {} var {} ms",
            k.level,
            k.platform,
            k.mode,
            k.datatype,
            k.model,
            k.parallelism,
            k.scope,
            l.count,
            num(l.min, exact),
            num(l.max, exact),
            num(l.mean, exact),
            num(l.variance, exact)
        );
    }
    out.push_str("\n== Level 3: pareto frontier (system scope) ==\n");
    match &l3.result {
        None => {
            let _ = writeln!(out, "{NO_DATA}");
        }
        Some(r) => {
            let names: Vec<_> = input.objectives.iter().map(|o| o.to_string()).collect();
            let _ = writeln!(
                out,
                "objectives: {} | frontier {} | dominated {} | excluded {}",
                names.join(", "),
                r.frontier.len(),
                r.dominated_count,
                r.excluded.len()
            );
            for &i in &r.frontier {
                let rec = &l3.records[i];
                let values: Vec<_> = input
                    .objectives
                    .iter()
                    .map(|o| {
                        let v = input.reader.read(rec, o.field).unwrap_or(f64::NAN);
                        format!("{}={}", o.field, num(v, exact))
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "{} | {} {} {} | {} | {}",
                    rec.model,
                    rec.platform.platform,
                    rec.platform.mode,
                    rec.platform.datatype,
                    rec.parallelism,
                    values.join(" ")
                );
            }
        }
    }
    out
}
