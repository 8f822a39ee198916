//! Report files: the check CSV, boundary norms, per-experiment tables and
//! the JSON summary.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use lamestab_core::estimates::{EstimateCheck, Verdict};
use lamestab_core::norms::BoundaryNormTable;

use crate::io::write_atomic;

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const CHECKS_FILE: &str = "checks.csv";
pub const BOUNDARY_FILE: &str = "boundary_norms.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub const CHECK_COLUMNS: [&str; 9] = [
    "experiment_id",
    "check_name",
    "param",
    "lhs",
    "rhs",
    "ratio",
    "fitted_constant",
    "exponent",
    "pass",
];

/// A check as it appears in the CSV and the JSON summary. `pass` holds the
/// verdict string (`pass`, `fail`, `skipped`, `calibration`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub experiment_id: String,
    pub check_name: String,
    pub param: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub fitted_constant: f64,
    pub exponent: Option<f64>,
    pub pass: String,
}

impl From<&EstimateCheck> for CheckRow {
    fn from(c: &EstimateCheck) -> Self {
        CheckRow {
            experiment_id: c.experiment_id.clone(),
            check_name: c.name.clone(),
            param: c.param,
            lhs: c.lhs,
            rhs: c.rhs_unscaled,
            ratio: c.ratio(),
            fitted_constant: c.fitted_constant,
            exponent: c.exponent,
            pass: c.verdict.as_str().into(),
        }
    }
}

/// A plain table written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshSummary {
    pub h_target: f64,
    pub h_max: f64,
    pub vertices: usize,
    pub triangles: usize,
    pub nodes: usize,
    pub vector_dofs: usize,
    pub min_angle_degrees: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySummary {
    pub perimeter: f64,
    pub h_half: f64,
    pub h_one: f64,
    pub h_three_halves: f64,
    pub theta: f64,
    pub frequency: Option<f64>,
}

impl From<&BoundaryNormTable> for BoundarySummary {
    fn from(t: &BoundaryNormTable) -> Self {
        BoundarySummary {
            perimeter: t.perimeter,
            h_half: t.h_half,
            h_one: t.h_one,
            h_three_halves: t.h_three_halves,
            theta: t.theta,
            frequency: t.frequency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub id: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub calibration: usize,
    /// Fitted constants and rates specific to the experiment.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub name: Option<String>,
    pub seed: u64,
    pub mesh: MeshSummary,
    pub boundary: BoundarySummary,
    pub experiments: Vec<ExperimentSummary>,
    pub checks: Vec<CheckRow>,
    pub failed_checks: usize,
    pub exit_status: i32,
}

impl Summary {
    /// Nonzero exactly when some check failed.
    pub fn exit_status_of(checks: &[CheckRow]) -> i32 {
        i32::from(checks.iter().any(|c| c.pass == Verdict::Fail.as_str()))
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Summary,
    pub boundary: BoundaryNormTable,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn exit_status(&self) -> i32 {
        self.summary.exit_status
    }

    /// Writes every report file into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        // with no checks requested only the mesh and boundary summaries go out
        if !self.summary.checks.is_empty() {
            let path = dir.join(CHECKS_FILE);
            write_atomic(&path, |f| {
                let mut w = csv::Writer::from_writer(f);
                w.write_record(CHECK_COLUMNS)?;
                for c in &self.summary.checks {
                    w.write_record([
                        c.experiment_id.clone(),
                        c.check_name.clone(),
                        fmt(c.param),
                        fmt(c.lhs),
                        fmt(c.rhs),
                        fmt(c.ratio),
                        fmt(c.fitted_constant),
                        c.exponent.map(fmt).unwrap_or_default(),
                        c.pass.clone(),
                    ])?;
                }
                w.flush()
            })?;
            written.push(path);
        }

        let path = dir.join(BOUNDARY_FILE);
        write_atomic(&path, |f| {
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["s", "norm", "theta", "frequency"])?;
            for (s, n) in self.boundary.rows() {
                w.write_record([
                    fmt(s),
                    fmt(n),
                    fmt(self.boundary.theta),
                    self.boundary.frequency.map(fmt).unwrap_or_default(),
                ])?;
            }
            w.flush()
        })?;
        written.push(path);

        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            write_atomic(&path, |f| {
                let mut w = csv::Writer::from_writer(f);
                w.write_record(&t.columns)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(|x| fmt(*x)))?;
                }
                w.flush()
            })?;
            written.push(path);
        }

        let path = dir.join(SUMMARY_FILE);
        let json = serde_json::to_vec_pretty(&self.summary).map_err(io::Error::other)?;
        write_atomic(&path, |f| {
            io::Write::write_all(f, &json)?;
            io::Write::write_all(f, b"\n")
        })?;
        written.push(path);
        Ok(written)
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}
