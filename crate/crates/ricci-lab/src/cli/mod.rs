//! Scenario configuration, runners and reports behind the `ricci-lab` binary.
//!
//! A run parses its TOML configuration before touching the output directory,
//! so a malformed file leaves no artifacts behind.

pub mod config;
pub mod report;
pub mod scenarios;

pub use config::{ConfigError, Format, Scenario, ScenarioConfig};
pub use report::{emit_report, Check, Summary, Table, Timing};

use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Options that are not part of the configuration file.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    /// Record wall-clock seconds in the summary. Off by default so that
    /// repeated runs produce identical files.
    pub timings: bool,
}

/// Load the configuration (defaults when `config` is `None`) and apply overrides.
pub fn load_config(config: Option<&Path>, opts: &RunOptions) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(f) = opts.format {
        cfg.format = f;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run a scenario and write its report. The returned summary says whether
/// every check passed.
pub fn run(cfg: &ScenarioConfig, scenario: Scenario, opts: &RunOptions) -> Result<Summary, CliError> {
    let ctx = scenarios::Context::new(cfg);
    let start = Instant::now();
    let outcome = scenarios::run_scenario(&ctx, scenario);
    let seconds = start.elapsed().as_secs_f64();
    let mut summary = Summary::new(scenario.name(), cfg.seed);
    summary.checks = outcome.checks;
    summary.timings.push(Timing { scenario: scenario.name().to_string(), budget_s: scenario.budget(), seconds: opts.timings.then_some(seconds) });
    let io = |source| CliError::Io { path: opts.out.clone(), source };
    emit_report(&opts.out, cfg.format, &summary, &outcome.tables).map_err(io)?;
    for (name, body) in &outcome.files {
        std::fs::write(opts.out.join(name), body).map_err(io)?;
    }
    Ok(summary)
}
