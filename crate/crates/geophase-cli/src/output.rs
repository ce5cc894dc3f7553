//! Scan-row emission: CSV with a fixed header and 12-significant-digit
//! floats, or JSON mirroring the field names.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::OutputFormat;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("io failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] geophase_core::Error),
    #[error("config error: {0}")]
    Config(String),
}

/// One α-scan result row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub pd_holonomy: f64,
    pub pd_tdse: f64,
    pub commutator_norm: f64,
    pub leakage: f64,
    pub richardson_error: f64,
}

pub const CSV_HEADER: &str =
    "alpha,beta,pd_holonomy,pd_tdse,commutator_norm,leakage,richardson_error";

/// 12 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn csv_string(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fields = [
            row.alpha,
            row.beta,
            row.pd_holonomy,
            row.pd_tdse,
            row.commutator_norm,
            row.leakage,
            row.richardson_error,
        ];
        let line: Vec<String> = fields.iter().map(|&x| format_float(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn json_string(rows: &[ScanRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
    out.push('\n');
    out
}

pub fn render(rows: &[ScanRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => csv_string(rows),
        OutputFormat::Json => json_string(rows),
    }
}

/// Write rows to `path` in the requested format.
pub fn emit(rows: &[ScanRow], format: OutputFormat, path: &Path) -> Result<(), CliError> {
    let body = render(rows, format);
    let mut file = std::fs::File::create(path)
        .map_err(|source| CliError::IoFailure { path: path.to_path_buf(), source })?;
    file.write_all(body.as_bytes())
        .map_err(|source| CliError::IoFailure { path: path.to_path_buf(), source })?;
    Ok(())
}

/// Parse a CSV document produced by [`csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<ScanRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => return Err(CliError::Config(format!("unexpected CSV header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad CSV field: {e}")))?;
        if fields.len() != 7 {
            return Err(CliError::Config(format!("expected 7 fields, got {}", fields.len())));
        }
        rows.push(ScanRow {
            alpha: fields[0],
            beta: fields[1],
            pd_holonomy: fields[2],
            pd_tdse: fields[3],
            commutator_norm: fields[4],
            leakage: fields[5],
            richardson_error: fields[6],
        });
    }
    Ok(rows)
}
