//! Experiment runner for `formlab`: a registry of named experiments, strict
//! JSON configuration and deterministic CSV output.
//!
//! Exit codes: 0 on success, 2 when the run finished but raised a
//! non-convergence or hypothesis warning, 1 on any error.

pub mod config;
pub mod experiments;
pub mod output;
pub mod registry;

use std::fmt;
use std::path::{Path, PathBuf};

use formlab::FormError;

pub use config::{ConfigError, ExperimentConfig, ParamValue};
pub use registry::{find, registry, Context, Experiment, Flag, Outcome, Row};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Experiment { name: String, source: FormError },
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Experiment { name, source } => write!(f, "experiment {name} failed: {source}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides `output_dir` from the config.
    pub out: Option<PathBuf>,
    /// Forces plots on; plots are also emitted when the config asks for them.
    pub plots: bool,
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out: None,
            plots: false,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: &'static str,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub rows: usize,
    pub flags: Vec<Flag>,
}

impl RunSummary {
    pub fn exit_code(&self) -> u8 {
        if self.flags.is_empty() {
            0
        } else {
            2
        }
    }
}

/// `name<TAB>anchor` per registered experiment.
pub fn catalog() -> String {
    registry()
        .iter()
        .map(|e| format!("{}\t{}\n", e.name, e.anchor))
        .collect()
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let (config, raw) = config::load(path)?;
    run_config(&config, &raw, opts)
}

pub fn run_config(config: &ExperimentConfig, raw: &str, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let experiment = find(&config.experiment).ok_or_else(|| {
        ConfigError::new(format!(
            "unknown experiment `{}` (see `formlab list`)",
            config.experiment
        ))
        .at_key(raw, "experiment")
    })?;
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(ConfigError::new(format!("tolerance must be positive, got {}", opts.tol)).into());
    }
    let ctx = experiment.context(config, raw, opts.tol)?;
    let outcome = (experiment.run)(&ctx).map_err(|source| CliError::Experiment {
        name: experiment.name.to_string(),
        source,
    })?;

    let dir = opts
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let csv = dir.join(format!("{}.csv", experiment.name));
    output::write_csv(&csv, experiment.name, experiment.anchor, &outcome)
        .map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
    let svg = if opts.plots || config.emit_plots {
        let path = dir.join(format!("{}.svg", experiment.name));
        output::plot_csv(&csv, &path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Some(path)
    } else {
        None
    };
    Ok(RunSummary {
        experiment: experiment.name,
        csv,
        svg,
        rows: outcome.rows.len(),
        flags: outcome.flags,
    })
}
