//! Machine-readable run reports and comparison tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use frontal_core::ConvergenceHistory;
use serde::Serialize;

use crate::config::RunParams;
use crate::error::{Error, Result};

pub const REPORT_FILE: &str = "report.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const FRONTS_FILE: &str = "fronts.csv";
pub const COMPARE_FILE: &str = "compare.csv";

/// Summary of one run. Residuals are recomputed from the original,
/// unscaled `A` and `b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub source: String,
    pub mode: String,
    pub n: usize,
    pub nnz: usize,
    pub scaled_rows: bool,
    pub params: RunParams,
    pub factor_seconds: f64,
    pub solve_seconds: f64,
    /// Peak reals held during factorization (preconditioner setup).
    pub peak_stored_reals: usize,
    /// Reals retained by the factorization or preconditioner.
    pub stored_reals: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    pub relative_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structured_fronts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_outer_products: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front_stats: Option<String>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes `report.json`, and when present `history.csv` and `fronts.csv`,
/// into `dir`.
pub fn write_run(
    dir: &Path,
    report: &RunReport,
    history: Option<&ConvergenceHistory>,
    fronts_csv: Option<&str>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let put = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(Error::io(p))
    };
    if let Some(h) = history {
        put(HISTORY_FILE, &h.to_csv())?;
    }
    let mut report = report.clone();
    if let Some(csv) = fronts_csv {
        put(FRONTS_FILE, csv)?;
        report.front_stats = Some(FRONTS_FILE.into());
    }
    put(REPORT_FILE, &(report.to_json()? + "\n"))
}

const COLUMNS: [&str; 6] = [
    "mode",
    "factor_seconds",
    "peak_stored_reals",
    "iterations",
    "relative_residual",
    "converged",
];

fn cells(r: &RunReport) -> [String; 6] {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    [
        r.mode.clone(),
        format!("{:.3}", r.factor_seconds),
        r.peak_stored_reals.to_string(),
        opt(r.iterations.map(|i| i.to_string())),
        format!("{:.3e}", r.relative_residual),
        opt(r.converged.map(|c| c.to_string())),
    ]
}

pub fn comparison_csv(rows: &[RunReport]) -> String {
    let mut s = COLUMNS.join(",") + "\n";
    for r in rows {
        s += &cells(r).join(",");
        s.push('\n');
    }
    s
}

/// Same table as [`comparison_csv`], padded into aligned columns.
pub fn comparison_text(rows: &[RunReport]) -> String {
    let body: Vec<[String; 6]> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap())
        .collect();
    let mut s = String::new();
    let mut line = |cols: &[String]| {
        let padded: Vec<String> = cols.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        let _ = writeln!(s, "{}", padded.join("  ").trim_end());
    };
    line(&COLUMNS.map(String::from));
    for r in &body {
        line(r);
    }
    s
}
