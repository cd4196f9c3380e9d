//! Tabular experiment reports and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One row: a label, parameter values and ratio values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub params: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Extremes of one ratio column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: String,
    pub min: f64,
    pub max: f64,
    /// `max / min`.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportVerdict {
    pub text: String,
    pub passed: bool,
}

/// Result of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub param_columns: Vec<String>,
    pub ratio_columns: Vec<String>,
    pub rows: Vec<Row>,
    pub summary: Vec<ColumnSummary>,
    pub verdict: ReportVerdict,
    /// Free-form observations (settings, skipped rows, growth factors).
    pub notes: Vec<String>,
}

impl ExperimentReport {
    /// Builds a report; rows must be non-empty and every ratio finite and
    /// positive. Commas in labels become semicolons so CSV stays unquoted.
    pub fn new(
        id: impl Into<String>,
        param_columns: &[&str],
        ratio_columns: &[&str],
        rows: Vec<Row>,
    ) -> Result<Self> {
        let id = id.into();
        if rows.is_empty() {
            return Err(Error::domain(format!("report `{id}` has no rows")));
        }
        let (np, nr) = (param_columns.len(), ratio_columns.len());
        let mut rows = rows;
        for row in &mut rows {
            if row.params.len() != np || row.ratios.len() != nr {
                return Err(Error::domain(format!("row `{}` does not match the columns", row.label)));
            }
            if let Some(v) = row.ratios.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::numeric(
                    format!("report `{id}`: ratio {v} in row `{}` is not finite and positive", row.label),
                    *v,
                ));
            }
            row.label = row.label.replace(',', ";");
        }
        let summary = ratio_columns
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let min = rows.iter().map(|r| r.ratios[i]).fold(f64::INFINITY, f64::min);
                let max = rows.iter().map(|r| r.ratios[i]).fold(f64::NEG_INFINITY, f64::max);
                ColumnSummary { column: (*name).to_owned(), min, max, spread: max / min }
            })
            .collect();
        Ok(ExperimentReport {
            id,
            param_columns: param_columns.iter().map(|s| (*s).to_owned()).collect(),
            ratio_columns: ratio_columns.iter().map(|s| (*s).to_owned()).collect(),
            rows,
            summary,
            verdict: ReportVerdict { text: "no assertion".into(), passed: true },
            notes: Vec::new(),
        })
    }

    pub fn with_verdict(mut self, passed: bool, text: impl Into<String>) -> Self {
        self.verdict = ReportVerdict { text: text.into(), passed };
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Summary of the named ratio column.
    pub fn column(&self, name: &str) -> Option<&ColumnSummary> {
        self.summary.iter().find(|s| s.column == name)
    }

    /// Values of the named ratio column in row order.
    pub fn ratio_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.ratio_columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.ratios[i]).collect())
    }

    /// Values of the named parameter column in row order.
    pub fn param_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.param_columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.params[i]).collect())
    }

    /// `[PASS] id: text` or `[FAIL] id: text`.
    pub fn verdict_line(&self) -> String {
        let tag = if self.verdict.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {}: {}", self.id, self.verdict.text)
    }

    /// Header `label,<params>,<ratios>` then one line per row. Floats use
    /// the shortest representation that reads back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for c in self.param_columns.iter().chain(&self.ratio_columns) {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for v in row.params.iter().chain(&row.ratios) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reads back the numeric columns written by [`ExperimentReport::to_csv`]:
/// the header and, per row, the label and its numbers.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::config(Some(1), None, "empty CSV"))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let label = parts.next().unwrap_or_default().to_owned();
        let values = parts
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::config(Some(i + 2), None, e.to_string()))?;
        if values.len() + 1 != header.len() {
            return Err(Error::config(Some(i + 2), None, "column count differs from header"));
        }
        rows.push((label, values));
    }
    Ok((header, rows))
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// From the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// SHA-256 of the configuration text, hex encoded.
pub fn config_hash(config_text: &str) -> String {
    let digest = Sha256::digest(config_text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Path of the metadata file written next to `path`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta");
    path.with_file_name(name)
}

/// Writes the report and a sibling `.meta` file with the config hash and seed.
pub fn emit(report: &ExperimentReport, format: Format, path: &Path, config_text: &str, seed: u64) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::domain(format!("report `{}` has no rows", report.id)));
    }
    let body = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    fs::write(path, body)?;
    let meta = format!(
        "experiment = {}\nconfig_sha256 = {}\nseed = {seed}\nversion = {}\n",
        report.id,
        config_hash(config_text),
        env!("CARGO_PKG_VERSION")
    );
    fs::write(meta_path(path), meta)?;
    Ok(())
}
