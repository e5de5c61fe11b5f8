//! Config-driven experiment runner behind the `markedpop` binary.
//!
//! `markedpop run <config.json> [--out DIR] [--threads N]` reads a flat JSON
//! config, validates it completely, runs the experiment, and writes the
//! result CSVs plus `summary.csv` into the output directory. All results are
//! aggregated in replica order before any file is written, so output bytes do
//! not depend on the thread count.

pub mod config;
pub mod experiments;
pub mod summary;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentKind, Plan};
pub use experiments::Outputs;
pub use summary::{emit_summary, SummaryRow};

use crate::error::{Error, Result};
use crate::replicas::{with_threads, Execution};

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub exec: Execution,
}

#[derive(Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.summary.iter().all(SummaryRow::passed)
    }
}

/// Computes the experiment without writing anything.
pub fn execute(config: &ExperimentConfig, plan: &Plan, options: &RunOptions) -> Result<Outputs> {
    let (seed, replicas, exec) = (config.seed, config.replicas, options.exec);
    with_threads(options.threads, || match plan {
        Plan::Growth(p) => experiments::growth(p, seed, replicas, exec),
        Plan::Compare(p) => experiments::compare(p, seed, replicas, exec),
        Plan::DistEq(p) => experiments::dist_eq(p, seed, replicas, exec),
        Plan::PoissonGof(p) => experiments::poisson_gof_experiment(p, seed, replicas, exec),
        Plan::Accumulation(p) => experiments::accumulation(p, seed, replicas, exec),
        Plan::Fms(p) => experiments::fms(p, seed, replicas, exec),
    })
}

pub fn run_config(config: &ExperimentConfig, options: &RunOptions) -> Result<RunReport> {
    let plan = config.plan()?;
    let output_dir = options
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let outputs = execute(config, &plan, options)?;
    let mut files = outputs.files;
    files.push(("summary.csv".into(), emit_summary(&outputs.summary)));
    let written = write_all(&output_dir, &files)?;
    Ok(RunReport {
        output_dir,
        files: written,
        summary: outputs.summary,
    })
}

pub fn run(config_path: &Path, options: &RunOptions) -> Result<RunReport> {
    let config = ExperimentConfig::load(config_path)?;
    run_config(&config, options)
}

/// Writes every file or none: on the first failure, files already written
/// are removed.
fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(Error::Io(e));
        }
        written.push(path);
    }
    Ok(written)
}

/// Process exit code for an error: 1 for config problems, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 1,
        _ => 2,
    }
}
