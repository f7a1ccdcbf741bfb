//! Experiment harness for self-similar random fractal measures.
//!
//! This crate wraps the `fractalaw-core` kernels with JSON experiment
//! configs, machine-readable reports, CSV curve exports, and the
//! `fractalaw` command-line tool. Every experiment is deterministic given
//! its config: streams are derived from `(seed, tree index, address)`,
//! parallel work is reduced in index order, and reports are byte-identical
//! across runs and thread counts.

pub mod config;
pub mod experiments;
pub mod io;
pub mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures with a defined process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    /// Unreadable, unparsable, or invalid configuration (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// A theorem hypothesis does not hold, e.g. `λ_q >= 1` (exit 3).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    /// Unexpected internal failure (exit 4).
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Hypothesis(_) => 3,
            RunError::Internal(_) => 4,
        }
    }
}

impl From<fractalaw_core::Error> for RunError {
    fn from(e: fractalaw_core::Error) -> Self {
        RunError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Internal(e.to_string())
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Load a config, run the experiment it names, write `report.json` and
/// `curves.csv` (plus experiment artifacts) into the output directory,
/// and return the report. Exit code 0 iff all verdicts pass.
pub fn run_experiment(
    config_path: &Path,
    overrides: &Overrides,
) -> Result<report::Report, RunError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| RunError::Config(format!("{}: {e}", config_path.display())))?;
    let mut cfg: config::ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| RunError::Config(e.to_string()))?;
    cfg.apply_overrides(overrides);
    cfg.validate().map_err(RunError::Config)?;

    let out_dir = cfg
        .out_dir()
        .clone()
        .unwrap_or_else(|| PathBuf::from("fractalaw-out").join(cfg.kind_slug()));
    std::fs::create_dir_all(&out_dir)?;

    let run = || experiments::dispatch(&cfg, &out_dir);
    let report = match overrides.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| RunError::Internal(e.to_string()))?;
            pool.install(run)?
        }
        None => run()?,
    };

    io::atomic_write(
        &out_dir.join("report.json"),
        report.to_json_pretty().as_bytes(),
    )?;
    Ok(report)
}
