//! Registered experiments, their defaults and the resolved run context.

use std::collections::BTreeMap;

use formlab::FormError;

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments;

/// One output row; empty `parameter` or `t` are written as empty CSV fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub parameter: Option<f64>,
    pub t: Option<f64>,
    pub metric: String,
    pub value: f64,
}

impl Row {
    pub fn new(parameter: Option<f64>, t: Option<f64>, metric: impl Into<String>, value: f64) -> Self {
        Self {
            parameter,
            t,
            metric: metric.into(),
            value,
        }
    }
}

/// Conditions that turn a successful run into exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub enum Flag {
    NonConvergence(String),
    HypothesisViolation(String),
}

impl Flag {
    pub fn metric(&self) -> &'static str {
        match self {
            Flag::NonConvergence(_) => "NON-CONVERGENCE",
            Flag::HypothesisViolation(_) => "HYPOTHESIS-VIOLATION",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Flag::NonConvergence(s) | Flag::HypothesisViolation(s) => s,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub flags: Vec<Flag>,
}

impl Outcome {
    pub fn push(&mut self, parameter: Option<f64>, t: Option<f64>, metric: impl Into<String>, value: f64) {
        self.rows.push(Row::new(parameter, t, metric, value));
    }

    /// One row per entry plus a `<metric>_fitted_rate` row when available.
    pub fn push_report(&mut self, report: &formlab::semigroup::ConvergenceReport) {
        for (p, v) in report.parameter.iter().zip(&report.values) {
            self.push(Some(*p), report.t, report.metric.clone(), *v);
        }
        if let Some(rate) = report.fitted_rate {
            self.push(None, report.t, format!("{}_fitted_rate", report.metric), rate);
        }
    }

    pub fn flag(&mut self, flag: Flag) {
        self.flags.push(flag);
    }
}

pub type RunFn = fn(&Context) -> Result<Outcome, FormError>;

#[derive(Debug, Clone, Copy)]
pub enum TimeGrid {
    Unused,
    Fixed(&'static [f64]),
    /// `points` log-spaced times between `lo` and `hi` inclusive.
    LogSpaced {
        lo: f64,
        hi: f64,
        points: usize,
    },
}

impl TimeGrid {
    fn default_values(&self) -> Option<Vec<f64>> {
        match *self {
            TimeGrid::Unused => None,
            TimeGrid::Fixed(v) => Some(v.to_vec()),
            TimeGrid::LogSpaced { lo, hi, points } => Some(log_spaced(lo, hi, points)),
        }
    }
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points).map(|i| 10f64.powf(a + (b - a) * i as f64 / last)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub default: &'static [f64],
}

pub struct Experiment {
    pub name: &'static str,
    /// The result this experiment illustrates.
    pub anchor: &'static str,
    pub params: &'static [Param],
    pub mesh: Option<usize>,
    pub t_grid: TimeGrid,
    pub run: RunFn,
}

impl Experiment {
    /// Merges `config` over the defaults, rejecting anything this experiment
    /// does not take.
    pub fn context(&self, config: &ExperimentConfig, raw: &str, tol: f64) -> Result<Context, ConfigError> {
        let mut params: BTreeMap<&'static str, Vec<f64>> =
            self.params.iter().map(|p| (p.name, p.default.to_vec())).collect();
        for (key, value) in &config.parameters {
            let Some(spec) = self.params.iter().find(|p| p.name == key) else {
                let allowed: Vec<&str> = self.params.iter().map(|p| p.name).collect();
                let hint = if allowed.is_empty() {
                    "none".to_string()
                } else {
                    allowed.join(", ")
                };
                return Err(ConfigError::new(format!(
                    "unknown parameter `{key}` for experiment {} (accepted: {hint})",
                    self.name
                ))
                .at_key(raw, key));
            };
            let values = value.values();
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(ConfigError::new("parameter values must be finite and non-empty").at_key(raw, key));
            }
            params.insert(spec.name, values);
        }
        let mesh = match (self.mesh, config.mesh) {
            (_, Some(m)) if m < 2 => return Err(ConfigError::new("mesh must be at least 2").at_key(raw, "mesh")),
            (Some(_), Some(m)) => m,
            (Some(d), None) => d,
            (None, Some(_)) => {
                return Err(ConfigError::new(format!("experiment {} takes no mesh", self.name)).at_key(raw, "mesh"))
            }
            (None, None) => 0,
        };
        let t_grid = match (self.t_grid.default_values(), &config.t_grid) {
            (None, Some(_)) => {
                return Err(
                    ConfigError::new(format!("experiment {} takes no time grid", self.name)).at_key(raw, "t_grid")
                )
            }
            (Some(_), Some(t)) => {
                if t.is_empty() || t.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(ConfigError::new("times must be positive and finite").at_key(raw, "t_grid"));
                }
                t.clone()
            }
            (Some(d), None) => d,
            (None, None) => Vec::new(),
        };
        Ok(Context {
            mesh,
            t_grid,
            params,
            tol,
        })
    }
}

/// Resolved inputs of one run.
#[derive(Debug, Clone)]
pub struct Context {
    pub mesh: usize,
    pub t_grid: Vec<f64>,
    pub params: BTreeMap<&'static str, Vec<f64>>,
    /// Relative PSD floor for ordering checks.
    pub tol: f64,
}

impl Context {
    pub fn list(&self, name: &str) -> &[f64] {
        self.params
            .get(name)
            .map(Vec::as_slice)
            .unwrap_or_else(|| panic!("undeclared parameter {name}"))
    }

    pub fn scalar(&self, name: &str) -> Result<f64, FormError> {
        match self.list(name) {
            [x] => Ok(*x),
            other => Err(FormError::InvalidParameter(format!(
                "parameter {name} takes a single value, got {}",
                other.len()
            ))),
        }
    }

    /// Parameter values that must be integers of at least `min`.
    pub fn counts(&self, name: &str, min: usize) -> Result<Vec<usize>, FormError> {
        self.list(name)
            .iter()
            .map(|&x| {
                if x.fract() == 0.0 && x >= min as f64 {
                    Ok(x as usize)
                } else {
                    Err(FormError::InvalidParameter(format!(
                        "{name} must be an integer >= {min}, got {x}"
                    )))
                }
            })
            .collect()
    }

    pub fn count(&self, name: &str, min: usize) -> Result<usize, FormError> {
        self.scalar(name)?;
        Ok(self.counts(name, min)?[0])
    }
}

pub fn registry() -> &'static [Experiment] {
    experiments::ALL
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    registry().iter().find(|e| e.name == name)
}
