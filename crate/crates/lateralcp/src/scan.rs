//! Tabular output: one row per evaluated point, written as CSV or JSON.
//!
//! Column order is fixed and identical in both formats. Optional columns stay
//! empty (CSV) or null (JSON) when a quantity does not apply to the sweep.
//! Floats are serialized with shortest round-trip formatting, so a file is a
//! faithful, byte-deterministic record of the computed values.

use crate::error::{LcpError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// One evaluated point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    /// What the `value_si` column holds (e.g. `g`, `rho_pfa`, `u_lat`).
    pub quantity: String,
    /// Evaluation method that produced the value.
    pub method: String,
    /// Corrugation wavenumber, rad/m (empty when not applicable).
    pub k_rad_per_m: Option<f64>,
    /// Height above the mean surface plane, m.
    pub z_m: Option<f64>,
    /// Lateral position, m.
    pub x_m: Option<f64>,
    /// Dimensionless product k·z of the row.
    pub kz: Option<f64>,
    /// Thomas–Fermi radius, m (BEC sweeps only).
    pub r_tf_m: Option<f64>,
    /// Value in SI units of the quantity.
    pub value_si: f64,
    /// Conservative absolute error estimate, same units.
    pub err_est: f64,
    /// `ok` when the estimate meets the requested tolerance, `tol` when the
    /// evaluator converged only partially, `err` when it failed outright.
    pub flag: String,
}

impl ScanRow {
    /// Marks the row `ok`/`tol` by comparing the error estimate against the
    /// requested tolerances.
    pub fn set_flag(&mut self, rel_tol: f64, abs_tol: f64) {
        let budget = (rel_tol * self.value_si.abs()).max(abs_tol);
        self.flag = if self.err_est <= budget { "ok" } else { "tol" }.to_string();
    }
}

/// Run-metadata block for JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Resolved configuration (sorted keys; excludes output-only settings
    /// such as thread count so that reruns compare byte-identical).
    pub config: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub meta: ScanMeta,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = LcpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(LcpError::Config(format!(
                "unknown output format `{other}` (expected csv|json)"
            ))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Writes the rows as CSV with a header line.
pub fn write_csv<W: Write>(writer: W, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)
            .map_err(|e| LcpError::Parse(format!("CSV serialization failed: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows back from CSV (used by the round-trip tests and any downstream
/// tooling that prefers typed access).
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for rec in r.deserialize::<ScanRow>() {
        rows.push(rec.map_err(|e| LcpError::Parse(format!("CSV parse failed: {e}")))?);
    }
    Ok(rows)
}

/// Writes `{ "meta": …, "rows": […] }` as pretty-printed JSON with a trailing
/// newline.
pub fn write_json<W: Write>(mut writer: W, result: &ScanResult) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, result)
        .map_err(|e| LcpError::Parse(format!("JSON serialization failed: {e}")))?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Writes rows to `out` (or stdout when `None`) in the requested format.
pub fn write_output(
    out: Option<&Path>,
    format: OutputFormat,
    result: &ScanResult,
) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let buf = std::io::BufWriter::new(file);
            match format {
                OutputFormat::Csv => write_csv(buf, &result.rows),
                OutputFormat::Json => write_json(buf, result),
            }
        }
        None => {
            let stdout = std::io::stdout();
            let lock = stdout.lock();
            match format {
                OutputFormat::Csv => write_csv(lock, &result.rows),
                OutputFormat::Json => write_json(lock, result),
            }
        }
    }
}
