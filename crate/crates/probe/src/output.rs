//! CSV artifacts with fixed column order and float formatting.

use std::fs;
use std::path::{Path, PathBuf};

use crate::{ProbeError, Result};

pub const REPORT_FILE: &str = "report.csv";
pub const COEFFICIENTS_FILE: &str = "coefficients.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_FIT_FILE: &str = "sweep_fit.csv";

/// Seventeen significant digits in scientific notation, enough to round-trip
/// every `f64`.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// A table of already formatted cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| ProbeError::io(path, e))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| ProbeError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
