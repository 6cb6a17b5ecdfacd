use std::io::Write;
use std::path::{Path, PathBuf};

use tierbench::bundled;
use tierbench::catalog::{normalize, Catalog, DatatypeSpec, PeakPolicy, PlatformEntry};
use tierbench::measurements::{
    aggregate_stats, serialize_measurements, MeasurementStore, ModelRegistry, Record, RecordFilter, ValidationReport,
    Validator,
};
use tierbench::pareto::{frontier_csv, pareto_frontier, scatter_csv, FieldReader, Objective, ObjectiveField};
use tierbench::report::{render_report, ReportInput};
use tierbench::roofline::{
    arithmetic_intensity, curve_csv, log_samples, prediction_csv, prediction_table, roofline_curve, ModelInput,
    PredictionRow,
};
use tierbench::topology::{requirements_csv, training_requirements, NetworkModel};
use tierbench::{Error, Result};

use crate::args::{
    AnalyzeArgs, Common, IngestArgs, Measurements, ParetoArgs, PredictArgs, ReportArgs, Selection, StatsArgs,
    ValidateArgs,
};
use crate::config::{Config, CATALOG_ENV};

pub const DEFAULT_MODELS: [&str; 2] = ["resnet50", "googlenetv1"];
const CURVE_RANGE: (f64, f64, usize) = (0.01, 1e5, 71);

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failures,
}

struct Context {
    config: Config,
    out: PathBuf,
    catalog_path: Option<PathBuf>,
    exact: bool,
}

impl Context {
    fn new(common: &Common) -> Result<Self> {
        let config = Config::load(common.config.as_deref())?;
        let out = common
            .out
            .clone()
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        let catalog_path = common.catalog.clone().or_else(|| config.catalog.clone()).or_else(|| {
            std::env::var_os(CATALOG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        });
        Ok(Context {
            config,
            out,
            catalog_path,
            exact: common.exact,
        })
    }

    fn catalog(&self) -> Result<Catalog> {
        match &self.catalog_path {
            Some(path) => Catalog::parse(&read(path)?).map_err(|e| e.in_file(path.display().to_string())),
            None => Ok(bundled::catalog()),
        }
    }

    fn models(&self, requested: &[String]) -> Result<Vec<NetworkModel>> {
        let specs: Vec<String> = if !requested.is_empty() {
            requested.to_vec()
        } else if !self.config.models.is_empty() {
            self.config.models.clone()
        } else {
            DEFAULT_MODELS.iter().map(|s| s.to_string()).collect()
        };
        specs.iter().map(|s| load_model(s)).collect()
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::Io(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Writes to stdout, ignoring a closed pipe so `| head` ends quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// A topology file, or the key or name of a bundled model.
pub fn load_model(spec: &str) -> Result<NetworkModel> {
    let path = Path::new(spec);
    if path.is_file() {
        return NetworkModel::parse(&read(path)?).map_err(|e| e.in_file(spec));
    }
    bundled::model(spec).ok_or_else(|| {
        Error::InvalidInput(format!(
            "`{spec}` is neither a topology file nor a bundled model ({})",
            bundled::MODELS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
        ))
    })
}

fn slug(s: &str) -> String {
    let n = normalize(s);
    if n.is_empty() {
        "x".into()
    } else {
        n
    }
}

fn fmt(v: f64, exact: bool, decimals: usize) -> String {
    if exact {
        v.to_string()
    } else {
        format!("{v:.decimals$}")
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let datatypes = args
        .datatypes
        .iter()
        .map(|d| DatatypeSpec::new(d, None))
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    for spec in &args.topologies {
        let model = load_model(spec)?;
        let req = model.requirements();
        let totals = req.totals();
        let training = training_requirements(&req);
        let e = ctx.exact;
        text.push_str(&format!("{}: {} layers\n", model.name(), model.n()));
        if e {
            text.push_str(&format!("  ops           {} OP\n", req.o_total));
            text.push_str(&format!("  weights       {} elements\n", req.w_total));
            text.push_str(&format!("  activations   {} elements\n", req.t_total));
            text.push_str(&format!(
                "  training      {} OP, {} weight elements, {} gradient elements, {} buffer elements\n",
                training.ot_total, training.wu_total_elems, training.tg_total_elems, training.tensor_buffer_elems
            ));
        } else {
            text.push_str(&format!("  ops           {:.2} GOP\n", totals.gop()));
            text.push_str(&format!("  weights       {:.2} ME\n", totals.me()));
            text.push_str(&format!("  activations   {:.2} ME\n", req.t_total as f64 / 1e6));
            text.push_str(&format!(
                "  training      {:.2} GOP, {:.2} ME weights, {:.2} ME gradients, {:.2} ME buffer\n",
                training.ot_total as f64 / 1e9,
                training.wu_total_elems as f64 / 1e6,
                training.tg_total_elems as f64 / 1e6,
                training.tensor_buffer_elems as f64 / 1e6
            ));
        }
        if req.w_total > 0 && !datatypes.is_empty() {
            let ai = datatypes
                .iter()
                .map(|dt| {
                    arithmetic_intensity(model.name(), &req, dt, args.batch)
                        .map(|w| format!("{} {}", dt.name(), fmt(w.ai, e, 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            text.push_str(&format!("  intensity b={} {} op/B\n", args.batch, ai.join(", ")));
        }
        ctx.write(&format!("{}_layers.csv", slug(model.name())), &requirements_csv(&req))?;
    }
    emit(&text);
    ctx.write("analyze.txt", &text)?;
    Ok(Status::Ok)
}

fn matches_any(list: &[String], value: &str) -> bool {
    list.is_empty() || list.iter().any(|x| x.trim().eq_ignore_ascii_case(value))
}

fn selected_entries<'c>(catalog: &'c Catalog, sel: &Selection) -> Vec<&'c PlatformEntry> {
    catalog
        .entries()
        .iter()
        .filter(|e| {
            sel.platforms.is_empty()
                || sel.platforms.iter().any(|p| {
                    e.platform.eq_ignore_ascii_case(p.trim()) || tierbench::catalog::matches_alias(&e.platform, p)
                })
        })
        .filter(|e| matches_any(&sel.modes, &e.mode))
        .filter(|e| matches_any(&sel.datatypes, e.datatype.name()))
        .collect()
}

fn predictions(ctx: &Context, catalog: &Catalog, sel: &Selection) -> Result<Vec<PredictionRow>> {
    let models = ctx.models(&sel.models)?;
    let inputs: Vec<ModelInput> = models
        .iter()
        .map(|m| ModelInput::new(m.name(), &m.requirements()))
        .collect();
    let entries = selected_entries(catalog, sel);
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut datatypes: Vec<DatatypeSpec> = Vec::new();
    for e in &entries {
        let pair = (e.platform.clone(), e.mode.clone());
        if !pairs.contains(&pair) {
            pairs.push(pair);
        }
        if !datatypes.contains(&e.datatype) {
            datatypes.push(e.datatype.clone());
        }
    }
    if !sel.datatypes.is_empty() {
        datatypes = sel
            .datatypes
            .iter()
            .map(|d| DatatypeSpec::new(d.trim(), None))
            .collect::<Result<_>>()?;
    }
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no catalog platform matches the selection".into()));
    }
    let mut rows = prediction_table(catalog, &inputs, &pairs, &datatypes, sel.batch)?;
    if sel.datatypes.is_empty() {
        rows.retain(PredictionRow::is_supported);
    }
    Ok(rows)
}

pub fn predict(args: &PredictArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let catalog = ctx.catalog()?;
    let rows = predictions(&ctx, &catalog, &args.selection)?;
    let table = prediction_csv(&rows, ctx.exact);
    emit(&table);
    ctx.write("predictions.csv", &table)?;
    let (lo, hi, n) = CURVE_RANGE;
    let samples = log_samples(lo, hi, n);
    let mut written = Vec::new();
    for r in rows.iter().filter(|r| r.is_supported()) {
        let name = format!(
            "roofline_{}_{}_{}.csv",
            slug(&r.platform),
            slug(&r.mode),
            slug(&r.datatype)
        );
        if written.contains(&name) {
            continue;
        }
        let entry = catalog
            .get(&r.platform, &r.mode, &r.datatype)
            .expect("supported rows have a catalog entry");
        ctx.write(&name, &curve_csv(&roofline_curve(entry, &samples)?, ctx.exact))?;
        written.push(name);
    }
    Ok(Status::Ok)
}

fn load_measurements(m: &Measurements) -> Result<(Vec<Record>, ValidationReport)> {
    let (store, report) = if m.files.is_empty() {
        MeasurementStore::from_sources(&bundled::measurement_sources())?
    } else {
        MeasurementStore::load(&m.files)?
    };
    let records = filter_records(store.records(), &m.filter);
    Ok((records, report))
}

fn filter_records(records: &[Record], filters: &[RecordFilter]) -> Vec<Record> {
    records
        .iter()
        .filter(|r| filters.iter().all(|f| f.matches(r)))
        .cloned()
        .collect()
}

fn peak_policy(specs: &[String]) -> Result<PeakPolicy> {
    specs
        .iter()
        .try_fold(PeakPolicy::own_key(), |policy, s| policy.with_override(s))
}

fn status_of(report: &ValidationReport) -> Status {
    if report.has_failures() {
        Status::Failures
    } else {
        Status::Ok
    }
}

pub fn ingest(args: &IngestArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let (store, report) = MeasurementStore::load(&args.files)?;
    ctx.write(
        "measurements.csv",
        &serialize_measurements(store.records().iter().map(|r| &r.value)),
    )?;
    ctx.write("ingest.json", &report.to_json())?;
    emit(&report.to_text());
    Ok(status_of(&report))
}

pub fn validate(args: &ValidateArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let catalog = ctx.catalog()?;
    let mut registry: ModelRegistry = bundled::registry();
    let extra: Vec<String> = if args.models.is_empty() {
        ctx.config.models.clone()
    } else {
        args.models.clone()
    };
    for spec in &extra {
        let m = load_model(spec)?;
        registry.insert(m.name(), m.requirements());
    }
    let (records, mut report) = load_measurements(&args.measurements)?;
    let mut validator = Validator::new(&catalog, &registry);
    if !(args.consistency.threshold.is_finite() && args.consistency.threshold >= 0.0) {
        return Err(Error::InvalidInput("threshold must be a non-negative number".into()));
    }
    validator.threshold = args.consistency.threshold;
    validator.peaks = peak_policy(&args.consistency.reference_peak)?;
    let checked = validator.validate(&records);
    report.findings.extend(checked.findings);
    report.findings.sort();
    report.record_count = checked.record_count;
    ctx.write("validation.json", &report.to_json())?;
    emit(&report.to_text());
    Ok(status_of(&report))
}

pub fn stats(args: &StatsArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let (records, _) = load_measurements(&args.measurements)?;
    let s = aggregate_stats(&records, args.field)?;
    let e = ctx.exact;
    let csv = format!(
        "field,count,min,max,mean,variance,population_variance\n{},{},{},{},{},{},{}\n",
        args.field.name(),
        s.count,
        fmt(s.min, e, 4),
        fmt(s.max, e, 4),
        fmt(s.mean, e, 4),
        fmt(s.variance, e, 4),
        fmt(s.population_variance, e, 4)
    );
    emit(&csv);
    ctx.write("stats.csv", &csv)?;
    Ok(Status::Ok)
}

fn objectives_or_default(objectives: &[Objective]) -> Vec<Objective> {
    if objectives.is_empty() {
        vec![
            Objective::max(ObjectiveField::Top5),
            Objective::max(ObjectiveField::Throughput),
        ]
    } else {
        objectives.to_vec()
    }
}

pub fn pareto(args: &ParetoArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let catalog = ctx.catalog()?;
    let policy = peak_policy(&args.reference_peak)?;
    let reader = FieldReader::with_catalog(&catalog, &policy);
    let (records, _) = load_measurements(&args.measurements)?;
    let objectives = objectives_or_default(&args.objective);
    let result = pareto_frontier(&records, &objectives, &reader)?;
    let frontier = frontier_csv(&records, &result, &objectives, &reader, ctx.exact);
    ctx.write("pareto_frontier.csv", &frontier)?;
    ctx.write(
        "pareto_scatter.csv",
        &scatter_csv(&records, &result, &objectives, &reader, ctx.exact),
    )?;
    emit(&frontier);
    for f in &result.excluded {
        eprintln!("{f}");
    }
    Ok(Status::Ok)
}

pub fn report(args: &ReportArgs) -> Result<Status> {
    let ctx = Context::new(&args.common)?;
    let catalog = ctx.catalog()?;
    let policy = peak_policy(&args.reference_peak)?;
    let rows = predictions(&ctx, &catalog, &args.selection)?;
    let (records, _) = load_measurements(&args.measurements)?;
    let mut input = ReportInput::new(&rows, &records);
    input.objectives = objectives_or_default(&args.objective);
    input.reader = FieldReader::with_catalog(&catalog, &policy);
    input.exact = ctx.exact;
    let rendered = render_report(&input, args.format)?;
    for (name, contents) in &rendered.files {
        let path = ctx.write(name, contents)?;
        if name == "report.txt" {
            emit(contents);
        } else {
            emit(&format!("wrote {}\n", path.display()));
        }
    }
    Ok(Status::Ok)
}
