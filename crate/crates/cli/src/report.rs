//! Report rows, verdicts and their two renderings: a CSV table and a
//! sectioned key-value summary.

use std::fmt::Write as _;

use agq_core::C64;

use crate::config::{format_complex, ExperimentManifest};
use crate::error::Result;

/// One CSV field. Floats use the shortest round-trip form so identical runs
/// produce identical bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Complex(C64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Complex(c) => format_complex(*c),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<C64> for Cell {
    fn from(v: C64) -> Self {
        Cell::Complex(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Experiment-specific columns, in header order.
    pub values: Vec<Cell>,
    pub point: String,
    /// `None` on success, otherwise why the row failed.
    pub failure: Option<String>,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    /// A row whose computation was refused; the value columns stay empty.
    pub fn refused(width: usize, point: String, reason: impl Into<String>) -> Self {
        Row {
            values: vec![Cell::Empty; width],
            point,
            failure: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub name: String,
    pub passed: bool,
    /// Human-readable bound, e.g. `max deviation < 1e-8`.
    pub tolerance: String,
    /// The statistic compared against the bound.
    pub observed: String,
    pub extra: Vec<(String, String)>,
}

/// Everything a run produced: echo, rows, verdicts, timings.
#[derive(Debug, Clone)]
pub struct ReportDocument {
    pub manifest: ExperimentManifest,
    pub manifest_hash: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub criteria: Vec<CriterionVerdict>,
    pub wall_clock_seconds: f64,
    pub workers: usize,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Header row then data rows; `point`, `verdict` and `reason` trail the
    /// experiment's own columns.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.columns.clone();
        header.extend(["point", "verdict", "reason"]);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record: Vec<String> = row.values.iter().map(Cell::render).collect();
            record.push(row.point.clone());
            record.push(if row.passed() { "pass" } else { "fail" }.into());
            record.push(row.failure.clone().unwrap_or_default());
            w.write_record(&record)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 strings"))
    }

    pub fn to_summary(&self) -> String {
        let mut s = String::new();
        let failed_rows = self.rows.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "experiment = {}", self.manifest.experiment);
        let _ = writeln!(
            s,
            "verdict = {}",
            if self.passed() { "pass" } else { "fail" }
        );
        let _ = writeln!(s, "manifest_sha256 = {}", self.manifest_hash);
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(
            s,
            "environment = {} {}, workers {}",
            std::env::consts::OS,
            std::env::consts::ARCH,
            self.workers
        );
        let _ = writeln!(s, "wall_clock_seconds = {:.3}", self.wall_clock_seconds);
        let _ = writeln!(s, "rows = {}", self.rows.len());
        let _ = writeln!(s, "failed_rows = {failed_rows}");
        s.push_str("\n[manifest]\n");
        s.push_str(&self.manifest.canonical());
        for c in &self.criteria {
            let _ = writeln!(s, "\n[criterion {}]", c.name);
            let _ = writeln!(s, "verdict = {}", if c.passed { "pass" } else { "fail" });
            let _ = writeln!(s, "tolerance = {}", c.tolerance);
            let _ = writeln!(s, "observed = {}", c.observed);
            for (k, v) in &c.extra {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s
    }
}
