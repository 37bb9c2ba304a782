//! Report tables and file emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat};
use crate::error::Result;
use crate::numerics::{FitResult, Scalar};

/// A table with named columns and string cells.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    /// Column names.
    pub columns: Vec<String>,
    /// Rows of cells.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Empty table with the given columns.
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row.
    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Full-precision decimal text of a scalar.
pub fn cell(x: &Scalar) -> String {
    x.to_decimal_string()
}

/// Optional scalar cell, empty when absent.
pub fn opt_cell(x: &Option<Scalar>) -> String {
    x.as_ref().map(cell).unwrap_or_default()
}

/// Header shared by every report.
#[derive(Clone, Debug, Serialize)]
pub struct ReportHeader {
    /// Experiment name.
    pub experiment: String,
    /// Working precision.
    pub precision_bits: u32,
    /// Metric grid size.
    pub grid_size: usize,
    /// Depth.
    pub depth: usize,
    /// SHA-256 of the configuration.
    pub config_hash: String,
}

/// Result of one experiment: tables, measured constants, fits and metadata.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    /// Header.
    pub header: ReportHeader,
    /// Named tables.
    pub tables: BTreeMap<String, Table>,
    /// Named measured constants.
    pub constants: BTreeMap<String, String>,
    /// Named fits.
    pub fits: BTreeMap<String, FitResult>,
    /// Free-form notes about the numerical method.
    pub notes: Vec<String>,
    /// Wall-clock seconds of the whole run.
    pub wall_time: f64,
    /// Wall-clock seconds per row of the main table, if recorded.
    pub row_wall_times: Vec<f64>,
}

impl ExperimentReport {
    /// Empty report for `experiment` under `cfg`.
    pub fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        ExperimentReport {
            header: ReportHeader {
                experiment: experiment.to_string(),
                precision_bits: cfg.precision_bits,
                grid_size: cfg.grid_size,
                depth: cfg.depth,
                config_hash: cfg.hash(),
            },
            tables: BTreeMap::new(),
            constants: BTreeMap::new(),
            fits: BTreeMap::new(),
            notes: Vec::new(),
            wall_time: 0.0,
            row_wall_times: Vec::new(),
        }
    }

    /// Records a constant.
    pub fn constant(&mut self, name: &str, value: impl ToString) {
        self.constants.insert(name.to_string(), value.to_string());
    }

    /// CSV body of every table, concatenated in name order (used for determinism checks).
    pub fn csv_bodies(&self) -> String {
        let mut out = String::new();
        for (name, t) in &self.tables {
            let _ = writeln!(out, "# {name}");
            out.push_str(&t.to_csv());
        }
        out
    }

    /// Pretty JSON text.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::error::LabError::Invariant(e.to_string()))
    }

    /// Writes `<experiment>.json` and, for CSV output, `<experiment>_<table>.csv`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.header.experiment));
        std::fs::write(&json, self.to_json()?)?;
        written.push(json);
        if format == OutputFormat::Csv {
            for (name, t) in &self.tables {
                let p = dir.join(format!("{}_{}.csv", self.header.experiment, name));
                std::fs::write(&p, t.to_csv())?;
                written.push(p);
            }
        }
        Ok(written)
    }
}
