use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tierbench::measurements::{RecordFilter, StatsField};
use tierbench::pareto::Objective;
use tierbench::report::Format;

/// Analytical requirements, roofline predictions and measurement analysis
/// for neural network accelerators.
#[derive(Debug, Parser)]
#[command(name = "tierbench", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute ops, weights and activations of network topologies.
    Analyze(AnalyzeArgs),
    /// Predict attainable throughput on catalog platforms with the roofline model.
    Predict(PredictArgs),
    /// Parse measurement files, report row errors and write a merged file.
    Ingest(IngestArgs),
    /// Check measurements for throughput/latency consistency and efficiency.
    Validate(ValidateArgs),
    /// Summarize one numeric field over filtered measurements.
    Stats(StatsArgs),
    /// Compute the pareto frontier of measurements under chosen objectives.
    Pareto(ParetoArgs),
    /// Render predictions, statistics and the frontier in one report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory for written artifacts [default: ./out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Platform catalog CSV; falls back to the config file, then QUTIBENCH_CATALOG, then the bundled catalog
    #[arg(long, value_name = "FILE")]
    pub catalog: Option<PathBuf>,
    /// key=value file with defaults for `catalog`, `models` and `out`
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print numbers at full precision instead of rounding
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct Measurements {
    /// Measurement CSV files; the bundled dataset is used when none are given
    #[arg(value_name = "MEASUREMENTS")]
    pub files: Vec<PathBuf>,
    /// Keep records matching key=value (repeatable; all must match)
    #[arg(long, value_name = "KEY=VALUE")]
    pub filter: Vec<RecordFilter>,
}

#[derive(Debug, Args)]
pub struct Selection {
    /// Models as topology paths or bundled names, comma separated [default: the config file's models, else resnet50,googlenetv1]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub models: Vec<String>,
    /// Platform names or aliases such as tx2, comma separated [default: all]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub platforms: Vec<String>,
    /// Operating modes, comma separated [default: all of the selected platforms]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub modes: Vec<String>,
    /// Datatypes, comma separated [default: those the selected platforms support]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub datatypes: Vec<String>,
    /// Batch size of the workload
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub batch: u32,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Topology files or bundled model names
    #[arg(required = true, value_name = "TOPOLOGY")]
    pub topologies: Vec<String>,
    /// Datatypes to report arithmetic intensity for, comma separated
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "FP32,FP16,INT8")]
    pub datatypes: Vec<String>,
    /// Batch size used for arithmetic intensity
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub batch: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub selection: Selection,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Measurement CSV files
    #[arg(required = true, value_name = "MEASUREMENTS")]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Consistency {
    /// Relative ops mismatch tolerated before a warning
    #[arg(long, default_value_t = tierbench::measurements::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Pin a platform's efficiency denominator, e.g. tx2=MaxN/FP16 (repeatable)
    #[arg(long = "reference-peak", value_name = "PLATFORM=MODE/DATATYPE")]
    pub reference_peak: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub measurements: Measurements,
    /// Extra topologies declaring per-input ops, comma separated paths or bundled names
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub models: Vec<String>,
    #[command(flatten)]
    pub consistency: Consistency,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub measurements: Measurements,
    /// Field to summarize: latency, throughput, power, top1 or top5
    #[arg(long, default_value = "latency")]
    pub field: StatsField,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[command(flatten)]
    pub measurements: Measurements,
    /// Objective as field:max|min (repeatable) [default: top5:max throughput:max]
    #[arg(long, value_name = "FIELD:DIR")]
    pub objective: Vec<Objective>,
    /// Efficiency denominator override for the efficiency objective (repeatable)
    #[arg(long = "reference-peak", value_name = "PLATFORM=MODE/DATATYPE")]
    pub reference_peak: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub measurements: Measurements,
    #[command(flatten)]
    pub selection: Selection,
    /// Frontier objective as field:max|min (repeatable) [default: top5:max throughput:max]
    #[arg(long, value_name = "FIELD:DIR")]
    pub objective: Vec<Objective>,
    /// Efficiency denominator override for the efficiency objective (repeatable)
    #[arg(long = "reference-peak", value_name = "PLATFORM=MODE/DATATYPE")]
    pub reference_peak: Vec<String>,
    /// Output format: text, csv or json
    #[arg(long, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}
