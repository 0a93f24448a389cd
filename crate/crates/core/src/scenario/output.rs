use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::flow::FlowStatus;
use crate::scenario::config::ConfigDocument;
use crate::scenario::run::{Diagnostics, Masses, RunReport, SolverSummary, Verdicts};

pub const CSV_HEADER: &str = "t,area,int_fH,Q,deficit,hawking,umb_deficit,area_residual";

/// One row per output time; shortest round-trip formatting for every value.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for q in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            q.t,
            q.area,
            q.weighted_total_h,
            q.q,
            q.minkowski_deficit,
            q.hawking_mass.unwrap_or(f64::NAN),
            q.umbilicity_deficit,
            q.area_residual
        );
    }
    out
}

#[derive(Serialize)]
struct RunMeta {
    generated_unix_s: u64,
    elapsed_ms: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    version: &'static str,
    exit_code: i32,
    n: usize,
    surface_kind: &'static str,
    outer_minimizing: &'static str,
    status: &'a FlowStatus,
    slices: usize,
    limit_target: f64,
    masses: &'a Masses,
    diagnostics: &'a Diagnostics,
    verdicts: &'a Verdicts,
    warnings: &'a [String],
    solver: &'a SolverSummary,
    config: &'a ConfigDocument,
    /// The only nondeterministic content of the summary.
    run_meta: RunMeta,
}

/// JSON summary of a run. Everything except `run_meta` depends only on the config.
pub fn summary_value(report: &RunReport) -> Value {
    let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let summary = Summary {
        scenario: &report.scenario,
        version: env!("CARGO_PKG_VERSION"),
        exit_code: report.exit_code,
        n: report.n,
        surface_kind: report.surface_kind,
        outer_minimizing: report.outer_minimizing,
        status: &report.status,
        slices: report.rows.len(),
        limit_target: report.limit_target,
        masses: &report.masses,
        diagnostics: &report.diagnostics,
        verdicts: &report.verdicts,
        warnings: &report.warnings,
        solver: &report.solver,
        config: &report.config,
        run_meta: RunMeta { generated_unix_s: generated, elapsed_ms: report.elapsed.as_secs_f64() * 1e3 },
    };
    serde_json::to_value(summary).expect("summary is plain data")
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Writes the CSV table and JSON summary under `out_dir`; returns the summary.
pub fn emit_outputs(report: &RunReport, out_dir: &Path) -> Result<(EmittedPaths, Value)> {
    let paths = EmittedPaths { csv: out_dir.join(&report.csv_name), json: out_dir.join(&report.json_name) };
    write_file(&paths.csv, &render_csv(report))?;
    let summary = summary_value(report);
    write_file(&paths.json, &pretty(&summary))?;
    Ok((paths, summary))
}
