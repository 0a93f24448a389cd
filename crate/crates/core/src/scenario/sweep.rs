use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scenario::config::load_config;
use crate::scenario::output::{emit_outputs, pretty, write_file};
use crate::scenario::run::{error_exit_code, run_scenario, RunOptions};

pub const SWEEP_SUMMARY: &str = "sweep_summary.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    /// Largest exit code among the scenarios.
    pub exit_code: i32,
    /// Individual summaries keyed and ordered by scenario name.
    pub scenarios: BTreeMap<String, Value>,
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_one(path: &Path, out_dir: &Path, opts: RunOptions) -> (String, Value) {
    let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    let outcome = load_config(path).and_then(|cfg| {
        let report = run_scenario(&cfg, opts)?;
        let (_, summary) = emit_outputs(&report, out_dir)?;
        Ok((cfg.name, summary))
    });
    match outcome {
        Ok(pair) => pair,
        Err(e) => {
            let value = json!({
                "scenario": fallback,
                "exit_code": error_exit_code(&e),
                "error": e.to_string(),
            });
            (fallback, value)
        }
    }
}

/// Runs every `*.toml` in `dir` independently on `jobs` threads and writes
/// the aggregate to `out_dir/sweep_summary.json`.
pub fn run_sweep(dir: &Path, out_dir: &Path, jobs: usize, opts: RunOptions) -> Result<SweepSummary> {
    let files = scenario_files(dir)?;
    if files.is_empty() {
        return Err(Error::Validation(format!("no *.toml scenarios in {}", dir.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let results: Vec<(String, Value)> = pool.install(|| files.par_iter().map(|p| run_one(p, out_dir, opts)).collect());

    let mut scenarios = BTreeMap::new();
    for (name, value) in results {
        if scenarios.contains_key(&name) {
            return Err(Error::Validation(format!("duplicate scenario name `{name}` in sweep")));
        }
        scenarios.insert(name, value);
    }
    let exit_code = scenarios
        .values()
        .filter_map(|v| v["exit_code"].as_i64())
        .max()
        .unwrap_or(0) as i32;
    let summary = SweepSummary { exit_code, scenarios };
    let value = serde_json::to_value(&summary).expect("plain data");
    write_file(&out_dir.join(SWEEP_SUMMARY), &pretty(&value))?;
    Ok(summary)
}
