//! Monte-Carlo experiments over many runs and approaches.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::{Approach, ScenarioConfig};
use super::csv::{
    trace_csv, write_switch_row, write_uncertainty_rows, SWITCH_HEADER, UNCERTAINTY_HEADER,
};
use super::runner::{run_scenario, RunOutput};
use super::scenario::render;

#[derive(Debug, Clone, Default)]
pub struct ExperimentOptions {
    /// Approaches to run, in output order. Empty means the config's approach.
    pub approaches: Vec<Approach>,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Write one trace CSV per run under `traces/`.
    pub write_traces: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Runs ordered by approach, then run id.
    pub runs: Vec<RunOutput>,
    pub switch_errors_csv: String,
    pub uncertainties_csv: String,
}

fn execute(cfg: &ScenarioConfig, approaches: &[Approach]) -> Result<Vec<RunOutput>> {
    let jobs: Vec<(Approach, u64)> = approaches
        .iter()
        .flat_map(|&a| (0..cfg.runs as u64).map(move |r| (a, r)))
        .collect();
    // collect preserves job order regardless of scheduling
    jobs.par_iter()
        .map(|&(approach, run_id)| {
            let cfg = ScenarioConfig {
                approach,
                ..cfg.clone()
            };
            run_scenario(&cfg, run_id)
        })
        .collect()
}

/// Run `cfg.runs` runs of every requested approach. Output is independent of
/// the number of threads.
pub fn run_experiment(cfg: &ScenarioConfig, opts: &ExperimentOptions) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let approaches = if opts.approaches.is_empty() {
        vec![cfg.approach]
    } else {
        opts.approaches.clone()
    };
    let runs = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {n} worker threads: {e}")))?
            .install(|| execute(cfg, &approaches))?,
        None => execute(cfg, &approaches)?,
    };

    let mut switch_errors_csv = format!("{SWITCH_HEADER}\n");
    let mut uncertainties_csv = format!("{UNCERTAINTY_HEADER}\n");
    for run in &runs {
        for e in &run.switch_errors {
            write_switch_row(&mut switch_errors_csv, e);
        }
        write_uncertainty_rows(&mut uncertainties_csv, run.run_id, run.approach.as_str(), &run.trace);
    }
    Ok(ExperimentOutput {
        runs,
        switch_errors_csv,
        uncertainties_csv,
    })
}

pub fn trace_file_name(approach: Approach, run_id: u64) -> String {
    format!("{}_run{run_id:04}.csv", approach.as_str().to_lowercase())
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Manifest text: config echo, approaches, seed and crate version.
pub fn manifest(cfg: &ScenarioConfig, approaches: &[Approach]) -> String {
    let names: Vec<&str> = approaches.iter().map(|a| a.as_str()).collect();
    format!(
        "# dts experiment manifest\n# version = {}\n# approaches = {}\n# seed = {}\n# runs = {}\n{}",
        env!("CARGO_PKG_VERSION"),
        names.join(","),
        cfg.seed,
        cfg.runs,
        render(cfg)
    )
}

/// Write `switch_errors.csv`, `uncertainties.csv`, `manifest.txt` and, when
/// requested, `traces/*.csv` under `dir`.
pub fn write_experiment(
    dir: &Path,
    cfg: &ScenarioConfig,
    opts: &ExperimentOptions,
    out: &ExperimentOutput,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir.join("switch_errors.csv"), &out.switch_errors_csv)?;
    write(dir.join("uncertainties.csv"), &out.uncertainties_csv)?;
    let approaches = if opts.approaches.is_empty() {
        vec![cfg.approach]
    } else {
        opts.approaches.clone()
    };
    write(dir.join("manifest.txt"), &manifest(cfg, &approaches))?;
    if opts.write_traces {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces).map_err(|e| Error::io(&traces, e))?;
        for run in &out.runs {
            write(traces.join(trace_file_name(run.approach, run.run_id)), &trace_csv(&run.trace))?;
        }
    }
    Ok(())
}
