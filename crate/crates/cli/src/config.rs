//! Strict JSON experiment configuration.
//!
//! ```json
//! {
//!   "experiment": "robin_to_neumann",
//!   "parameters": { "k": [0.5, 0.25, 0.125] },
//!   "mesh": 128,
//!   "t_grid": [0.1],
//!   "output_dir": "out",
//!   "emit_plots": false
//! }
//! ```
//!
//! Every field but `experiment` is optional and falls back to the defaults of
//! the registered experiment. Unknown fields and unknown parameter names are
//! errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, ParamValue>,
    pub mesh: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_plots: bool,
}

/// A parameter is either one number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

impl ParamValue {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ParamValue::Scalar(x) => vec![*x],
            ParamValue::List(v) => v.clone(),
        }
    }
}

/// A configuration problem, located by line (1-based) where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            column: None,
            key: None,
            message: message.into(),
        }
    }

    /// Attaches `key` and the first line of `raw` that mentions it.
    pub fn at_key(mut self, raw: &str, key: &str) -> Self {
        self.line = key_line(raw, key);
        self.key = Some(key.to_string());
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(line), Some(column)) => write!(f, "line {line}, column {column}: ")?,
            (Some(line), None) => write!(f, "line {line}: ")?,
            _ => {}
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// First line containing `"key"` followed by a colon.
pub fn key_line(raw: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    raw.lines().enumerate().find_map(|(i, line)| {
        let at = line.find(&quoted)?;
        line[at + quoted.len()..].trim_start().starts_with(':').then_some(i + 1)
    })
}

/// The name inside the first pair of backticks of a serde message.
fn backticked(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

pub fn parse(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    serde_json::from_str(raw).map_err(|e| {
        let text = e.to_string();
        // serde_json appends the position, which is reported separately.
        let text = match text.rfind(" at line ") {
            Some(at) => text[..at].to_string(),
            None => text,
        };
        let key = text
            .starts_with("unknown field")
            .then(|| backticked(&text).map(str::to_string))
            .flatten();
        let located = e.line() > 0;
        ConfigError {
            line: located.then_some(e.line()),
            column: located.then_some(e.column()),
            key,
            message: text,
        }
    })
}

pub fn load(path: &Path) -> Result<(ExperimentConfig, String), ConfigError> {
    let raw =
        std::fs::read_to_string(path).map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&raw)?;
    Ok((config, raw))
}
