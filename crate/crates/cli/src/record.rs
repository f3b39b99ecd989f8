//! Run records and their three renderings.
//!
//! A record echoes the resolved configuration and carries every computed
//! quantity. Floats serialize with 17 significant digits so records
//! round-trip exactly and reruns diff clean. The records format is one line
//! per record: tab-separated `key=value` pairs in a fixed order. CSV has a
//! mandatory header with the same keys as columns. Wall clock is printed in
//! the human text only; it never enters machine-readable output.

use std::fmt::Write as _;
use std::str::FromStr;

use ratiolist::rng::RNG_ALGORITHM;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Records,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "records" => Ok(OutputFormat::Records),
            other => Err(format!(
                "unknown format {other:?}; expected text, csv, or records"
            )),
        }
    }
}

/// One executed experiment point.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub command: &'static str,
    /// `ok`, or `skipped: <reason>`.
    pub status: String,
    /// Resolved configuration, fixed order per command.
    pub config: Vec<(String, String)>,
    /// Computed quantities, fixed order per command.
    pub results: Vec<(String, String)>,
    /// Human-output only; excluded from csv/records for reproducibility.
    pub wall_clock_secs: f64,
}

impl RunRecord {
    pub fn new(command: &'static str) -> Self {
        RunRecord {
            command,
            status: "ok".into(),
            config: Vec::new(),
            results: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn skipped(command: &'static str, reason: impl std::fmt::Display) -> Self {
        RunRecord {
            command,
            status: format!("skipped: {reason}"),
            config: Vec::new(),
            results: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn cfg(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.config.push((key.into(), value.to_string()));
        self
    }

    pub fn cfg_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.config.push((key.into(), fmt_float(value)));
        self
    }

    pub fn res(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.results.push((key.into(), value.to_string()));
        self
    }

    pub fn res_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.results.push((key.into(), fmt_float(value)));
        self
    }

    fn pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("command".to_string(), self.command.to_string()),
            ("version".to_string(), ARTIFACT_VERSION.to_string()),
            ("rng".to_string(), RNG_ALGORITHM.to_string()),
            ("status".to_string(), self.status.clone()),
        ];
        pairs.extend(self.config.iter().cloned());
        pairs.extend(self.results.iter().cloned());
        pairs
    }

    /// One records-format line.
    pub fn record_line(&self) -> String {
        self.pairs()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("\t")
    }

    /// Human-readable block, wall clock included.
    pub fn human_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[{}] {}", self.command, self.status);
        for (k, v) in &self.config {
            let _ = writeln!(out, "  {k:<24} {v}");
        }
        if !self.results.is_empty() {
            let _ = writeln!(out, "  --");
        }
        for (k, v) in &self.results {
            let _ = writeln!(out, "  {k:<24} {v}");
        }
        let _ = writeln!(out, "  wall_clock_secs          {:.3}", self.wall_clock_secs);
        out
    }
}

/// Serializes a float with 17 significant digits (round-trip exact).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// CSV rendering with the column union of the given records as header.
/// Skipped records leave absent columns empty.
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut columns: Vec<String> = Vec::new();
    for record in records {
        for (k, _) in record.pairs() {
            if !columns.contains(&k) {
                columns.push(k);
            }
        }
    }
    to_csv_with_columns(records, &columns)
}

/// CSV rendering against a fixed schema; commands with a known schema use
/// this so that even an empty record set emits the mandatory header.
pub fn to_csv_with_columns(records: &[RunRecord], columns: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", columns.join(","));
    for record in records {
        let pairs = record.pairs();
        let row: Vec<String> = columns
            .iter()
            .map(|c| {
                pairs
                    .iter()
                    .find(|(k, _)| k == c)
                    .map(|(_, v)| csv_escape(v))
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Records rendering: one line per record.
pub fn records_text(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let _ = writeln!(out, "{}", record.record_line());
    }
    out
}
