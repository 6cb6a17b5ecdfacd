//! Hardware platform catalog.
//!
//! Each row of the catalog is one platform in one operating mode with one
//! native datatype. Rows are keyed by `(platform, mode, datatype)`.
//!
//! ```
//! use tierbench::catalog::Catalog;
//!
//! let text = "platform,mode,datatype,peak_tops,mem_bw_gbps,tdp_watts,cost_usd\n\
//!             Nvidia Jetson TX2,MaxN,FP16,1.333,59.7,,469\n";
//! let catalog = Catalog::parse(text).unwrap();
//! let tx2 = catalog.get("Nvidia Jetson TX2", "MaxN", "FP16").unwrap();
//! assert_eq!(tx2.peak_gops(), 1333.0);
//! assert_eq!(tx2.ridge_point(), Some(1333.0 / 59.7));
//! ```

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::csvio::{check_header, fmt_opt, opt_f64, read_table, write_table};
use crate::error::{Error, Result};
use crate::finding::{Finding, RecordId};

const NAMED: [(&str, u32); 6] = [
    ("FP32", 32),
    ("FP16", 16),
    ("INT8", 8),
    ("INT4", 4),
    ("BIN", 1),
    ("TERN", 2),
];

/// A numeric datatype and its storage width.
///
/// The named types (FP32, FP16, INT8, INT4, BIN, TERN) carry their width
/// implicitly; any other name needs an explicit bit count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DatatypeSpec {
    name: String,
    bits: u32,
}

impl DatatypeSpec {
    pub fn new(name: &str, bits: Option<u32>) -> Result<Self> {
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::invalid("empty datatype name"));
        }
        let named = NAMED.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).copied();
        match (named, bits) {
            (Some((canonical, width)), None) => Ok(DatatypeSpec {
                name: canonical.to_string(),
                bits: width,
            }),
            (Some((canonical, width)), Some(b)) if b == width => Ok(DatatypeSpec {
                name: canonical.to_string(),
                bits: width,
            }),
            (Some((canonical, width)), Some(b)) => {
                Err(Error::invalid(format!("{canonical} is {width} bits wide, not {b}")))
            }
            (None, Some(b)) if (1..=64).contains(&b) => Ok(DatatypeSpec {
                name: name.to_string(),
                bits: b,
            }),
            (None, Some(b)) => Err(Error::invalid(format!("bit width {b} out of range"))),
            (None, None) => Err(Error::invalid(format!(
                "unknown datatype `{name}` needs an explicit bits value"
            ))),
        }
    }

    /// One of the named types; panics on anything else.
    pub fn named(name: &str) -> Self {
        Self::new(name, None).expect("named datatype")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_named(&self) -> bool {
        NAMED.iter().any(|(n, _)| *n == self.name)
    }

    pub fn bytes_per_element(&self) -> Ratio<u64> {
        Ratio::new(u64::from(self.bits), 8)
    }
}

impl fmt::Display for DatatypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Storage bytes per element, as an exact fraction.
pub fn datatype_bytes(dt: &DatatypeSpec) -> Ratio<u64> {
    dt.bytes_per_element()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PlatformKey {
    pub platform: String,
    pub mode: String,
    pub datatype: String,
}

impl PlatformKey {
    pub fn new(platform: &str, mode: &str, datatype: &str) -> Self {
        PlatformKey {
            platform: platform.to_string(),
            mode: mode.to_string(),
            datatype: datatype.to_string(),
        }
    }

    fn matches(&self, platform: &str, mode: &str, datatype: &str) -> bool {
        self.platform.eq_ignore_ascii_case(platform)
            && self.mode.eq_ignore_ascii_case(mode)
            && self.datatype.eq_ignore_ascii_case(datatype)
    }
}

impl fmt::Display for PlatformKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.platform, self.mode, self.datatype)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlatformEntry {
    pub platform: String,
    pub mode: String,
    pub datatype: DatatypeSpec,
    pub peak_tops: f64,
    pub mem_bw_gbps: Option<f64>,
    pub tdp_watts: Option<f64>,
    pub cost_usd: Option<f64>,
}

impl PlatformEntry {
    pub fn validate(&self) -> Result<()> {
        if self.platform.is_empty() || self.mode.is_empty() {
            return Err(Error::invalid("platform and mode must be nonempty"));
        }
        if !(self.peak_tops.is_finite() && self.peak_tops > 0.0) {
            return Err(Error::invalid(format!(
                "peak_tops must be positive, got {}",
                self.peak_tops
            )));
        }
        if let Some(bw) = self.mem_bw_gbps {
            if !(bw.is_finite() && bw > 0.0) {
                return Err(Error::invalid(format!("mem_bw_gbps must be positive, got {bw}")));
            }
        }
        for (name, v) in [("tdp_watts", self.tdp_watts), ("cost_usd", self.cost_usd)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid(format!("{name} must not be negative, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn key(&self) -> PlatformKey {
        PlatformKey::new(&self.platform, &self.mode, self.datatype.name())
    }

    /// Peak throughput in GOP/s.
    pub fn peak_gops(&self) -> f64 {
        self.peak_tops * 1000.0
    }

    /// Arithmetic intensity (OP/byte) where the bandwidth and compute limbs
    /// of the roofline meet.
    pub fn ridge_point(&self) -> Option<f64> {
        self.mem_bw_gbps.map(|bw| self.peak_gops() / bw)
    }

    pub fn tops_per_watt(&self) -> Option<f64> {
        self.tdp_watts.filter(|w| *w > 0.0).map(|w| self.peak_tops / w)
    }
}

/// Reduces a name to lowercase alphanumerics for loose matching.
pub fn normalize(name: &str) -> String {
    name.chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Whether `query` names `platform`: a case- and punctuation-insensitive
/// substring match, so `tx2` selects "Nvidia Jetson TX2".
pub fn matches_alias(platform: &str, query: &str) -> bool {
    let q = normalize(query);
    !q.is_empty() && normalize(platform).contains(&q)
}

const HEADER: [&str; 7] = [
    "platform",
    "mode",
    "datatype",
    "peak_tops",
    "mem_bw_gbps",
    "tdp_watts",
    "cost_usd",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Catalog {
    entries: Vec<PlatformEntry>,
}

impl Catalog {
    pub fn new(entries: Vec<PlatformEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            e.validate()?;
            let k = e.key();
            let folded = (
                k.platform.to_lowercase(),
                k.mode.to_lowercase(),
                k.datatype.to_lowercase(),
            );
            if !seen.insert(folded) {
                return Err(Error::invalid(format!("duplicate catalog key `{k}`")));
            }
        }
        Ok(Catalog { entries })
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_catalog(text)
    }

    pub fn entries(&self) -> &[PlatformEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup, ignoring ASCII case.
    pub fn get(&self, platform: &str, mode: &str, datatype: &str) -> Option<&PlatformEntry> {
        self.entries.iter().find(|e| e.key().matches(platform, mode, datatype))
    }

    pub fn get_key(&self, key: &PlatformKey) -> Option<&PlatformEntry> {
        self.get(&key.platform, &key.mode, &key.datatype)
    }

    /// Entries whose platform matches the alias `query`, in catalog order.
    pub fn select<'a>(&'a self, query: &'a str) -> impl Iterator<Item = &'a PlatformEntry> + 'a {
        self.entries.iter().filter(move |e| matches_alias(&e.platform, query))
    }

    pub fn to_csv(&self) -> String {
        serialize_catalog(self)
    }
}

/// Parses the catalog CSV; a trailing `bits` column is optional.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let table = read_table(text)?;
    let width = check_header(&table.header, &HEADER, &["bits"])?;
    let mut entries = Vec::with_capacity(table.rows.len());
    let mut seen: Vec<(PlatformKey, usize)> = Vec::new();
    for (line, row) in &table.rows {
        let line = *line;
        if row.len() != width {
            return Err(Error::parse(
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        let bits = match row.get(7).unwrap_or("") {
            "" => None,
            raw => Some(
                raw.parse::<u32>()
                    .map_err(|_| Error::parse(line, format!("malformed number bits=`{raw}`")))?,
            ),
        };
        let datatype = DatatypeSpec::new(&row[2], bits).map_err(|e| Error::parse(line, e.to_string()))?;
        let peak_tops = opt_f64(line, "peak_tops", &row[3])?.ok_or_else(|| Error::parse(line, "missing peak_tops"))?;
        let entry = PlatformEntry {
            platform: row[0].to_string(),
            mode: row[1].to_string(),
            datatype,
            peak_tops,
            mem_bw_gbps: opt_f64(line, "mem_bw_gbps", &row[4])?,
            tdp_watts: opt_f64(line, "tdp_watts", &row[5])?,
            cost_usd: opt_f64(line, "cost_usd", &row[6])?,
        };
        entry.validate().map_err(|e| Error::parse(line, e.to_string()))?;
        let key = entry.key();
        if let Some((_, first)) = seen
            .iter()
            .find(|(k, _)| k.matches(&key.platform, &key.mode, &key.datatype))
        {
            return Err(Error::parse(
                line,
                format!("duplicate catalog key `{key}` (first defined on line {first})"),
            ));
        }
        seen.push((key, line));
        entries.push(entry);
    }
    Ok(Catalog { entries })
}

pub fn serialize_catalog(catalog: &Catalog) -> String {
    let mut header = HEADER.to_vec();
    header.push("bits");
    write_table(
        &header,
        catalog.entries.iter().map(|e| {
            [
                e.platform.clone(),
                e.mode.clone(),
                e.datatype.name().to_string(),
                e.peak_tops.to_string(),
                fmt_opt(e.mem_bw_gbps),
                fmt_opt(e.tdp_watts),
                fmt_opt(e.cost_usd),
                if e.datatype.is_named() {
                    String::new()
                } else {
                    e.datatype.bits().to_string()
                },
            ]
        }),
    )
}

/// A performance-per-watt figure as printed alongside a platform.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrintedRatio {
    pub key: PlatformKey,
    pub tops_per_watt: f64,
    pub line: usize,
}

pub fn parse_printed_ratios(text: &str) -> Result<Vec<PrintedRatio>> {
    let table = read_table(text)?;
    check_header(&table.header, &["platform", "mode", "datatype", "tops_per_watt"], &[])?;
    table
        .rows
        .iter()
        .map(|(line, row)| {
            if row.len() != 4 {
                return Err(Error::parse(*line, "expected 4 fields"));
            }
            let tops_per_watt = opt_f64(*line, "tops_per_watt", &row[3])?
                .ok_or_else(|| Error::parse(*line, "missing tops_per_watt"))?;
            Ok(PrintedRatio {
                key: PlatformKey::new(&row[0], &row[1], &row[2]),
                tops_per_watt,
                line: *line,
            })
        })
        .collect()
}

/// Default tolerance of [`check_power_ratios`], in TOP/s per W.
pub const RATIO_TOLERANCE: f64 = 0.05;

/// Compares `peak_tops / tdp_watts` of each catalog row against a printed
/// ratio. Disagreements are reported as warnings; the catalog is left as is.
pub fn check_power_ratios(catalog: &Catalog, printed: &[PrintedRatio], tolerance: f64) -> Vec<Finding> {
    let mut findings = Vec::new();
    for p in printed {
        let id = RecordId::new(p.key.to_string(), p.line);
        let Some(entry) = catalog.get_key(&p.key) else {
            findings.push(Finding::warn(id, "unknown-reference", "no such catalog row"));
            continue;
        };
        match entry.tops_per_watt() {
            None => findings.push(Finding::warn(id, "missing-power", "catalog row has no power figure")),
            Some(r) if (r - p.tops_per_watt).abs() > tolerance => findings.push(Finding::warn(
                id,
                "power-ratio-mismatch",
                format!(
                    "peak/power = {} / {} = {:.3} TOP/s/W, printed {}",
                    entry.peak_tops,
                    entry.tdp_watts.unwrap_or_default(),
                    r,
                    p.tops_per_watt
                ),
            )),
            Some(_) => {}
        }
    }
    findings
}

/// Chooses which catalog row supplies the peak used as an efficiency
/// denominator.
///
/// By default a record is compared against the row with its own key. An
/// override pins every record of a platform to one fixed `(mode, datatype)`
/// row instead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeakPolicy {
    overrides: Vec<(String, String, String)>,
}

impl PeakPolicy {
    pub fn own_key() -> Self {
        Self::default()
    }

    /// Adds an override from `PLATFORM=MODE/DATATYPE`; the platform part is
    /// matched as an alias.
    pub fn with_override(mut self, spec: &str) -> Result<Self> {
        let parse = || -> Option<(String, String, String)> {
            let (platform, rest) = spec.split_once('=')?;
            let (mode, datatype) = rest.split_once('/')?;
            let parts = [platform.trim(), mode.trim(), datatype.trim()];
            if parts.iter().any(|p| p.is_empty()) {
                return None;
            }
            Some((parts[0].into(), parts[1].into(), parts[2].into()))
        };
        let entry = parse().ok_or_else(|| {
            Error::invalid(format!(
                "reference peak `{spec}` is not of the form PLATFORM=MODE/DATATYPE"
            ))
        })?;
        self.overrides.push(entry);
        Ok(self)
    }

    pub fn overrides(&self) -> impl Iterator<Item = String> + '_ {
        self.overrides.iter().map(|(p, m, d)| format!("{p}={m}/{d}"))
    }

    /// The catalog row used as the reference for records keyed `key`.
    pub fn reference<'c>(&self, catalog: &'c Catalog, key: &PlatformKey) -> Option<&'c PlatformEntry> {
        match self
            .overrides
            .iter()
            .find(|(p, _, _)| key.platform.eq_ignore_ascii_case(p) || matches_alias(&key.platform, p))
        {
            Some((_, mode, dt)) => catalog.get(&key.platform, mode, dt),
            None => catalog.get_key(key),
        }
    }
}
