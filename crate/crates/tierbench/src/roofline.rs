//! Roofline analysis: arithmetic intensity, attainable throughput and
//! compute/memory-bound classification.
//!
//! Memory traffic is modelled as the network's weights, read once per batch at
//! the datatype's storage width; activations stay on chip.
//!
//! ```
//! use tierbench::catalog::DatatypeSpec;
//! use tierbench::roofline::arithmetic_intensity;
//! use tierbench::topology::Totals;
//!
//! let resnet = Totals::from_display(7.72, 25.50);
//! let int8 = DatatypeSpec::named("INT8");
//! let w = arithmetic_intensity("ResNet50", resnet, &int8, 1).unwrap();
//! assert_eq!(w.ai.round(), 303.0);
//! ```

use std::fmt;

use serde::Serialize;

use crate::catalog::{Catalog, DatatypeSpec, PlatformEntry, PlatformKey};
use crate::csvio::write_table;
use crate::error::{Error, Result};
use crate::topology::Totals;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkloadPoint {
    pub label: String,
    /// Operations per byte of off-chip traffic.
    pub ai: f64,
    /// Operations per input.
    pub ops: u64,
    pub batch: u32,
}

/// `batch · ops / (weights · bytes_per_element)`.
pub fn arithmetic_intensity(
    label: &str,
    totals: impl Into<Totals>,
    dt: &DatatypeSpec,
    batch: u32,
) -> Result<WorkloadPoint> {
    let t = totals.into();
    if batch == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    if t.weights == 0 {
        return Err(Error::invalid(format!(
            "`{label}` has no weights, so its arithmetic intensity is undefined"
        )));
    }
    // ai(b) is computed as b * ai(1) so it is exactly linear in the batch size.
    let single = (t.ops as f64 * 8.0) / (t.weights as f64 * f64::from(dt.bits()));
    Ok(WorkloadPoint {
        label: label.to_string(),
        ai: f64::from(batch) * single,
        ops: t.ops,
        batch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    ComputeBound,
    MemoryBound,
    Ridge,
}

impl Bound {
    pub fn as_str(self) -> &'static str {
        match self {
            Bound::ComputeBound => "compute_bound",
            Bound::MemoryBound => "memory_bound",
            Bound::Ridge => "ridge",
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub platform_key: PlatformKey,
    pub attainable_gops: f64,
    pub bound: Bound,
    /// Set when the platform has no bandwidth figure and the prediction fell
    /// back to its compute peak.
    pub bandwidth_missing: bool,
}

fn roof(peak: f64, bw: Option<f64>, ai: f64) -> (f64, Bound) {
    match bw {
        None => (peak, Bound::ComputeBound),
        Some(bw) => {
            let memory = ai * bw;
            if memory < peak {
                (memory, Bound::MemoryBound)
            } else if memory > peak {
                (peak, Bound::ComputeBound)
            } else {
                (peak, Bound::Ridge)
            }
        }
    }
}

/// `min(peak, ai · bandwidth)` in GOP/s.
pub fn attainable_performance(p: &PlatformEntry, w: &WorkloadPoint) -> Prediction {
    let (attainable_gops, bound) = roof(p.peak_gops(), p.mem_bw_gbps, w.ai);
    Prediction {
        platform_key: p.key(),
        attainable_gops,
        bound,
        bandwidth_missing: p.mem_bw_gbps.is_none(),
    }
}

/// A model entering a prediction table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInput {
    pub name: String,
    pub totals: Totals,
}

impl ModelInput {
    pub fn new(name: impl Into<String>, totals: impl Into<Totals>) -> Self {
        ModelInput {
            name: name.into(),
            totals: totals.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionRow {
    pub model: String,
    pub platform: String,
    pub mode: String,
    pub datatype: String,
    pub batch: u32,
    pub ai: f64,
    /// `None` when the catalog has no row for this platform, mode and datatype.
    pub prediction: Option<Prediction>,
}

impl PredictionRow {
    pub fn is_supported(&self) -> bool {
        self.prediction.is_some()
    }

    pub fn bound_label(&self) -> &'static str {
        self.prediction.as_ref().map_or("unsupported", |p| p.bound.as_str())
    }
}

/// Cross product of models, `(platform, mode)` pairs and datatypes.
///
/// Rows come out in input order, model-major. Combinations missing from the
/// catalog are kept and marked unsupported.
pub fn prediction_table(
    catalog: &Catalog,
    models: &[ModelInput],
    platforms: &[(String, String)],
    datatypes: &[DatatypeSpec],
    batch: u32,
) -> Result<Vec<PredictionRow>> {
    if models.is_empty() || platforms.is_empty() || datatypes.is_empty() {
        return Err(Error::invalid(
            "prediction table needs at least one model, platform and datatype",
        ));
    }
    let mut rows = Vec::with_capacity(models.len() * platforms.len() * datatypes.len());
    for m in models {
        for (platform, mode) in platforms {
            for dt in datatypes {
                let w = arithmetic_intensity(&m.name, m.totals, dt, batch)?;
                let prediction = catalog
                    .get(platform, mode, dt.name())
                    .map(|entry| attainable_performance(entry, &w));
                rows.push(PredictionRow {
                    model: m.name.clone(),
                    platform: platform.clone(),
                    mode: mode.clone(),
                    datatype: dt.name().to_string(),
                    batch,
                    ai: w.ai,
                    prediction,
                });
            }
        }
    }
    Ok(rows)
}

fn fmt_num(v: f64, exact: bool) -> String {
    if exact {
        v.to_string()
    } else {
        format!("{v:.2}")
    }
}

pub const PREDICTION_HEADER: [&str; 8] = [
    "model",
    "platform",
    "mode",
    "datatype",
    "batch",
    "ai_op_per_byte",
    "attainable_gops",
    "bound",
];

/// Renders rows as CSV; `exact` prints full precision instead of 2 decimals.
pub fn prediction_csv(rows: &[PredictionRow], exact: bool) -> String {
    write_table(
        &PREDICTION_HEADER,
        rows.iter().map(|r| {
            [
                r.model.clone(),
                r.platform.clone(),
                r.mode.clone(),
                r.datatype.clone(),
                r.batch.to_string(),
                fmt_num(r.ai, exact),
                r.prediction
                    .as_ref()
                    .map(|p| fmt_num(p.attainable_gops, exact))
                    .unwrap_or_default(),
                r.bound_label().to_string(),
            ]
        }),
    )
}

/// Samples of the roofline of `p` at the given intensities, with the ridge
/// point inserted in order when the platform has a bandwidth figure.
pub fn roofline_curve(p: &PlatformEntry, ai_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if ai_samples.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::invalid("intensity samples must be positive"));
    }
    if ai_samples.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("intensity samples must be sorted ascending"));
    }
    let peak = p.peak_gops();
    let mut points: Vec<(f64, f64)> = ai_samples
        .iter()
        .map(|&ai| (ai, roof(peak, p.mem_bw_gbps, ai).0))
        .collect();
    if let Some(ridge) = p.ridge_point() {
        let at = points.partition_point(|(ai, _)| *ai < ridge);
        if points.get(at).is_none_or(|(ai, _)| *ai != ridge) {
            points.insert(at, (ridge, roof(peak, p.mem_bw_gbps, ridge).0));
        }
    }
    Ok(points)
}

/// `n` intensities spaced evenly on a log scale between `lo` and `hi`.
pub fn log_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

pub fn curve_csv(points: &[(f64, f64)], exact: bool) -> String {
    write_table(
        &["ai", "attainable_gops"],
        points.iter().map(|(ai, g)| [fmt_num(*ai, exact), fmt_num(*g, exact)]),
    )
}
