use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use clap::CommandFactory;
use tempfile::TempDir;
use tierbench_cli::{Cli, CATALOG_ENV, EXIT_FAILURES, EXIT_OK, EXIT_USAGE};

const ANALYZE_GOLDEN: &str = include_str!("golden/analyze.txt");
const PREDICT_GOLDEN: &str = include_str!("golden/predict.csv");

fn repo(path: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(path)
        .display()
        .to_string()
}

fn tierbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tierbench"))
        .args(args)
        .current_dir(dir)
        .env_remove(CATALOG_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn long_flags(help: &str) -> BTreeSet<String> {
    help.split(|c: char| c.is_whitespace() || c == ',')
        .filter_map(|w| w.strip_prefix("--"))
        .map(|w| w.split(['=', '<', '[']).next().unwrap().to_string())
        .filter(|w| !w.is_empty() && w.chars().all(|c| c.is_ascii_lowercase() || c == '-'))
        .collect()
}

#[test]
fn every_subcommand_help_lists_exactly_its_flags() {
    let dir = TempDir::new().unwrap();
    let cli = Cli::command();
    let names: Vec<&str> = cli.get_subcommands().map(|c| c.get_name()).collect();
    assert_eq!(
        names,
        ["analyze", "predict", "ingest", "validate", "stats", "pareto", "report"]
    );
    for sub in cli.get_subcommands() {
        let mut table: BTreeSet<String> = sub
            .get_arguments()
            .filter_map(|a| a.get_long().map(str::to_string))
            .collect();
        table.extend(["help".to_string(), "version".to_string()]);
        for arg in sub.get_arguments().filter(|a| a.get_long().is_some()) {
            assert!(
                arg.get_help().is_some(),
                "{} --{} has no help text",
                sub.get_name(),
                arg.get_long().unwrap()
            );
        }
        let out = tierbench(dir.path(), &[sub.get_name(), "--help"]);
        assert_eq!(code(&out), EXIT_OK);
        let listed = long_flags(&stdout(&out));
        assert_eq!(
            listed,
            table,
            "help of `{}` disagrees with its flag table",
            sub.get_name()
        );
    }
}

#[test]
fn unknown_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(dir.path(), &["predict", "--bogus"]);
    assert_eq!(code(&out), EXIT_USAGE);
    assert!(stderr(&out).contains("--bogus"));
}

#[test]
fn analyze_without_arguments_prints_usage() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(dir.path(), &["analyze"]);
    assert_eq!(code(&out), EXIT_USAGE);
    assert!(stderr(&out).contains("Usage: tierbench analyze"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn analyze_matches_golden_output() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(dir.path(), &["analyze", "resnet50", "googlenetv1", "--out", "o"]);
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    assert_eq!(stdout(&out), ANALYZE_GOLDEN);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("o/analyze.txt")).unwrap(),
        ANALYZE_GOLDEN
    );
    assert!(dir.path().join("o/resnet50_layers.csv").is_file());
}

#[test]
fn analyze_resnet50_topology_reports_published_totals() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &["analyze", &repo("models/resnet50.topo"), "--exact", "--out", "o"],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    let text = stdout(&out);
    let number = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.trim_start().starts_with(label)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    let gop = number("ops") / 1e9;
    let me = number("weights") / 1e6;
    assert!((gop - 7.72).abs() / 7.72 <= 0.015, "{gop}");
    assert!((me - 25.50).abs() / 25.50 <= 0.01, "{me}");
}

#[test]
fn predict_matches_golden_table() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &[
            "predict",
            "--models",
            "resnet50,googlenetv1",
            "--platforms",
            "tx2,zcu104",
            "--modes",
            "MaxN,MaxQ,666MHz,775MHz",
            "--batch",
            "1",
            "--out",
            "o",
        ],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    assert_eq!(stdout(&out), PREDICT_GOLDEN);
    let peaks: BTreeSet<&str> = PREDICT_GOLDEN
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap())
        .collect();
    assert_eq!(
        peaks,
        ["1333.00", "437.00", "4604.00", "5357.00", "667.00", "874.00"]
            .into_iter()
            .collect()
    );
    assert!(PREDICT_GOLDEN.lines().skip(1).all(|l| l.ends_with(",compute_bound")));
    let curve = std::fs::read_to_string(dir.path().join("o/roofline_nvidiajetsontx2_maxn_fp16.csv")).unwrap();
    assert!(curve.starts_with("ai,attainable_gops\n"));
}

#[test]
fn predict_exact_prints_full_precision() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &[
            "predict",
            "--models",
            "resnet50",
            "--platforms",
            "tx2",
            "--modes",
            "MaxN",
            "--datatypes",
            "FP16",
            "--exact",
        ],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let ai = row.split(',').nth(5).unwrap();
    assert!(ai.split('.').nth(1).is_some_and(|d| d.len() > 2), "{row}");
    assert!(
        dir.path().join("out/predictions.csv").is_file(),
        "default output directory is ./out"
    );
}

fn catalog_with_tx2_peak(dir: &Path, name: &str, peak: &str) -> String {
    let path = dir.join(name);
    std::fs::write(
        &path,
        format!("platform,mode,datatype,peak_tops,mem_bw_gbps,tdp_watts,cost_usd\nNvidia Jetson TX2,MaxN,FP32,{peak},59.7,,\n"),
    )
    .unwrap();
    path.display().to_string()
}

fn predicted_peak(dir: &Path, extra: &[&str], env: Option<&str>) -> String {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tierbench"));
    cmd.args(["predict", "--models", "resnet50", "--platforms", "tx2", "--out", "o"])
        .args(extra)
        .current_dir(dir)
        .env_remove(CATALOG_ENV);
    if let Some(v) = env {
        cmd.env(CATALOG_ENV, v);
    }
    let out = cmd.output().unwrap();
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(6)
        .unwrap()
        .to_string()
}

#[test]
fn catalog_precedence_is_flag_then_config_then_environment() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let flag = catalog_with_tx2_peak(d, "flag.csv", "1");
    let env = catalog_with_tx2_peak(d, "env.csv", "3");
    catalog_with_tx2_peak(d, "config.csv", "2");
    std::fs::write(d.join("tb.conf"), "# defaults\ncatalog = config.csv\n").unwrap();

    assert_eq!(predicted_peak(d, &[], None), "667.00");
    assert_eq!(predicted_peak(d, &[], Some(&env)), "3000.00");
    assert_eq!(predicted_peak(d, &["--config", "tb.conf"], Some(&env)), "2000.00");
    assert_eq!(
        predicted_peak(d, &["--config", "tb.conf", "--catalog", &flag], Some(&env)),
        "1000.00"
    );
}

#[test]
fn config_with_unknown_key_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "colour=blue\n").unwrap();
    let out = tierbench(dir.path(), &["predict", "--config", "bad.conf"]);
    assert_eq!(code(&out), EXIT_USAGE);
    assert!(stderr(&out).contains("bad.conf: line 1"), "{}", stderr(&out));
}

const MEASUREMENT_HEADER: &str =
    "level,platform,mode,datatype,model,layer,parallelism_kind,parallelism_n,scope,latency_ms,throughput_gops,power_watts,top1_pct,top5_pct\n";

#[test]
fn ingest_exit_status_follows_findings() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let good = format!("{MEASUREMENT_HEADER}3,Nvidia Jetson TX2,MaxN,FP16,ResNet50,,batch,1,system,10,400,,70,90\n");
    let bad = format!("{MEASUREMENT_HEADER}3,Nvidia Jetson TX2,MaxN,FP16,ResNet50,,batch,1,system,-1,400,,70,90\n");
    std::fs::write(d.join("good.csv"), good).unwrap();
    std::fs::write(d.join("bad.csv"), bad).unwrap();

    let ok = tierbench(d, &["ingest", "good.csv", "--out", "o"]);
    assert_eq!(code(&ok), EXIT_OK, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("1 records, 0 warnings, 0 failures"));
    assert!(d.join("o/measurements.csv").is_file());

    let failing = tierbench(d, &["ingest", "good.csv", "bad.csv", "--out", "o"]);
    assert_eq!(code(&failing), EXIT_FAILURES);
    assert!(
        stdout(&failing).contains("bad.csv:2 fail [nonpositive-latency]"),
        "{}",
        stdout(&failing)
    );
}

#[test]
fn input_errors_carry_file_context_without_backtraces() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("headless.csv"), "1,2,3\n").unwrap();
    std::fs::write(
        d.join("broken.topo"),
        "name,kind,out_h,out_w,in_ch,kernel_h,kernel_w,stride,out_ch\nc1,conv,0,1,1,1,1,1,1\n",
    )
    .unwrap();
    for args in [
        vec!["ingest", "missing.csv"],
        vec!["ingest", "headless.csv"],
        vec!["analyze", "broken.topo"],
        vec!["analyze", "no-such-model"],
        vec!["pareto", "--objective", "speed:max"],
        vec!["stats", "--field", "colour"],
        vec!["validate", "--reference-peak", "tx2"],
    ] {
        let out = tierbench(d, &args);
        assert_eq!(code(&out), EXIT_USAGE, "{args:?}: {}", stderr(&out));
        let err = stderr(&out);
        assert!(
            !err.contains("panicked") && !err.contains("backtrace"),
            "{args:?}: {err}"
        );
    }
    let out = tierbench(d, &["analyze", "broken.topo"]);
    assert!(stderr(&out).contains("broken.topo: line 2"), "{}", stderr(&out));
}

#[test]
fn validate_bundled_dataset_has_no_failures() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &[
            "validate",
            "--filter",
            "level=3",
            "--filter",
            "platform=tx2",
            "--reference-peak",
            "tx2=MaxN/FP16",
        ],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.contains("efficiency-mismatch"), "{text}");
    assert!(text.ends_with("192 records, 16 warnings, 0 failures\n"), "{text}");
    assert!(dir.path().join("out/validation.json").is_file());
}

#[test]
fn stats_reports_level2_latency_summary() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &[
            "stats",
            "--field",
            "latency",
            "--filter",
            "level=2",
            "--filter",
            "mode=MaxN",
            "--filter",
            "parallelism_n=1",
        ],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    assert_eq!(
        stdout(&out).lines().nth(1).unwrap(),
        "latency_ms,16,1.0200,1.7300,1.1650,0.0382,0.0358"
    );
}

#[test]
fn pareto_writes_frontier_and_scatter() {
    let dir = TempDir::new().unwrap();
    let out = tierbench(
        dir.path(),
        &[
            "pareto",
            "--filter",
            "level=3",
            "--filter",
            "scope=system",
            "--out",
            "o",
        ],
    );
    assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
    let frontier = stdout(&out);
    assert_eq!(frontier.lines().count(), 3, "{frontier}");
    let scatter = std::fs::read_to_string(dir.path().join("o/pareto_scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 113);
    assert_eq!(scatter.lines().filter(|l| l.ends_with(",1")).count(), 2);
}

#[test]
fn report_writes_one_file_per_format() {
    let dir = TempDir::new().unwrap();
    for (format, file) in [
        ("text", "report.txt"),
        ("csv", "level3_frontier.csv"),
        ("json", "report.json"),
    ] {
        let out = tierbench(dir.path(), &["report", "--format", format, "--out", format]);
        assert_eq!(code(&out), EXIT_OK, "{}", stderr(&out));
        assert!(dir.path().join(format).join(file).is_file(), "{format}");
    }
    let out = tierbench(dir.path(), &["report", "--format", "yaml"]);
    assert_eq!(code(&out), EXIT_USAGE);
}

#[test]
fn version_and_help_exit_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&tierbench(dir.path(), &["--version"])), EXIT_OK);
    assert_eq!(code(&tierbench(dir.path(), &["--help"])), EXIT_OK);
    assert_eq!(code(&tierbench(dir.path(), &[])), EXIT_USAGE);
}
