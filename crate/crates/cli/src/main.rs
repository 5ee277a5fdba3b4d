use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dts_core::harness::calibrate::{calibrate_k_num, scan_heater_current, SigmaStatistic};
use dts_core::harness::csv::trace_csv;
use dts_core::harness::experiment::write_experiment;
use dts_core::harness::scenario;
use dts_core::harness::{
    run_experiment, run_scenario, summarize_file, Approach, ExperimentOptions, FailureSpec,
    ScenarioConfig,
};

/// Uncertainty-aware digital twin co-simulation of a thermal incubator.
#[derive(Parser)]
#[command(name = "dts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace CSV.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run index within the experiment; the run seed is seed + run.
        #[arg(long, default_value_t = 0)]
        run: u64,
    },
    /// Run many scenarios and write switch_errors.csv, uncertainties.csv and traces.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Skip the per-run trace files.
        #[arg(long)]
        no_traces: bool,
    },
    /// Fit k_num to a target end-of-run uncertainty and report the closed-loop
    /// oscillation of the nominal plant.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Target box temperature std of an un-reset run (°C).
        #[arg(long, default_value_t = 2.52)]
        target_std: f64,
        /// Match the std at the run's `end` or its `peak`.
        #[arg(long, default_value = "end")]
        statistic: SigmaStatistic,
        #[arg(long, default_value_t = 1e-4)]
        rel_tol: f64,
        /// Heater currents (A) for the oscillation scan.
        #[arg(long, value_delimiter = ',')]
        currents: Vec<f64>,
    },
    /// Summary statistics of a switch_errors.csv file.
    Summarize {
        /// Path to switch_errors.csv.
        input: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; defaults are used for keys it leaves out.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// One approach, or a comma-separated list for `experiment`.
    #[arg(long, value_delimiter = ',')]
    approach: Vec<Approach>,
    /// Run length (s).
    #[arg(long)]
    duration: Option<f64>,
    /// Solver step (s).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    k_num: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of runs (experiment) or runs maximised over (calibrate).
    #[arg(long)]
    runs: Option<usize>,
    /// Confidence of the uncertainty-aware controller.
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    reliability_limit: Option<f64>,
    /// Inconsistency threshold on the degree of consistency.
    #[arg(long)]
    consistency_threshold: Option<f64>,
    /// Inject the insulation failure at this time (s).
    #[arg(long)]
    fail_at: Option<f64>,
    /// Output directory (or file for `calibrate`).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.scenario {
            Some(path) => scenario::load(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(&a) = self.approach.first() {
            cfg.approach = a;
        }
        if let Some(v) = self.duration {
            cfg.duration = v;
        }
        if let Some(v) = self.step {
            cfg.solver.h = v;
        }
        if let Some(v) = self.k_num {
            cfg.solver.k_num = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.confidence {
            cfg.band.confidence = v;
        }
        if let Some(v) = self.reliability_limit {
            cfg.fusion.reliability_limit = v;
        }
        if let Some(v) = self.consistency_threshold {
            cfg.consistency.r = v;
        }
        if let Some(t) = self.fail_at {
            cfg.failure = Some(FailureSpec {
                time: t,
                ..cfg.failure.unwrap_or_default()
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new("out"))
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { common, run } => {
            if common.approach.len() > 1 {
                bail!("`run` takes a single approach; use `experiment` for several");
            }
            let cfg = common.config()?;
            let out = run_scenario(&cfg, run)?;
            let dir = common.out_dir();
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("trace_{}_run{run:04}.csv", cfg.approach.as_str().to_lowercase()));
            fs::write(&path, trace_csv(&out.trace)).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{} run {run}: {} rows, {} switches{} -> {}",
                cfg.approach,
                out.trace.len(),
                out.switch_errors.len(),
                out.divergence
                    .map(|d| format!(", diverged at {} s", d.time))
                    .unwrap_or_default(),
                path.display()
            );
        }
        Command::Experiment {
            common,
            threads,
            no_traces,
        } => {
            let cfg = common.config()?;
            let opts = ExperimentOptions {
                approaches: common.approach.clone(),
                threads,
                write_traces: !no_traces,
            };
            let out = run_experiment(&cfg, &opts)?;
            let dir = common.out_dir();
            write_experiment(dir, &cfg, &opts, &out)?;
            println!("{} runs written to {}", out.runs.len(), dir.display());
            if out.runs.iter().any(|r| !r.switch_errors.is_empty()) {
                print!("{}", summarize_file(dir.join("switch_errors.csv"))?);
            }
        }
        Command::Calibrate {
            common,
            target_std,
            statistic,
            rel_tol,
            currents,
        } => {
            let mut cfg = common.config()?;
            let k = calibrate_k_num(&cfg, target_std, statistic, rel_tol)?;
            let label = match statistic {
                SigmaStatistic::End => format!("sigma({} s)", cfg.duration),
                SigmaStatistic::Peak => "peak sigma".to_string(),
            };
            println!(
                "h = {} s: k_num = {} gives {label} = {} (target {}, {} runs)",
                cfg.solver.h, k.k_num, k.sigma, k.target, k.evaluations
            );
            let currents = if currents.is_empty() {
                vec![cfg.plant.i_heater.mean()]
            } else {
                currents
            };
            for o in scan_heater_current(&cfg, &currents)? {
                println!(
                    "I = {:.3} A: warm-up {:.0} s, period {:.1} s over {} cycles, T in [{:.3}, {:.3}]",
                    o.i_heater, o.warmup, o.period, o.cycles, o.t_min, o.t_max
                );
            }
            if let Some(path) = &common.out {
                cfg.solver.k_num = k.k_num;
                scenario::save(&cfg, path)?;
                println!("calibrated scenario written to {}", path.display());
            }
        }
        Command::Summarize { input } => {
            print!("{}", summarize_file(&input)?);
        }
    }
    Ok(())
}
