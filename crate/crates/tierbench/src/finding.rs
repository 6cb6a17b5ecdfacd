//! Validation findings shared by the catalog checks, measurement validation and
//! pareto queries.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warn,
    Fail,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warn => "warn",
            Severity::Fail => "fail",
        })
    }
}

/// Identifies a record by the input it came from and its 1-based line.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RecordId {
    pub source: String,
    pub line: usize,
}

impl RecordId {
    pub fn new(source: impl Into<String>, line: usize) -> Self {
        RecordId {
            source: source.into(),
            line,
        }
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.source)
        } else {
            write!(f, "{}:{}", self.source, self.line)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub record: RecordId,
    pub rule: String,
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    pub fn new(record: RecordId, rule: impl Into<String>, severity: Severity, message: impl Into<String>) -> Self {
        Finding {
            record,
            rule: rule.into(),
            severity,
            message: message.into(),
        }
    }

    pub fn warn(record: RecordId, rule: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(record, rule, Severity::Warn, message)
    }

    pub fn fail(record: RecordId, rule: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(record, rule, Severity::Fail, message)
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} [{}] {}", self.record, self.severity, self.rule, self.message)
    }
}

/// Sorts findings by record id, then rule name.
pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort();
}
