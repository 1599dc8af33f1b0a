//! Job configuration: built-in defaults, overlaid by an optional JSON file,
//! overlaid by command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wigner_lv::dynamics::{
    DEFAULT_EPS_A, DEFAULT_EPS_ALPHA, DEFAULT_N_TOTAL, DEFAULT_RECORD_COUNT, DEFAULT_START,
};
use wigner_lv::equilibria::{DEFAULT_ENVELOPE, DEFAULT_SEED_RESOLUTION};
use wigner_lv::{BifurcationParam, ModelParams, PhasePoint, Region, ScanConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Flow,
    Stagnation,
    Onset,
    Poincare,
    Bifurcate,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Flow => "flow",
            Command::Stagnation => "stagnation",
            Command::Onset => "onset",
            Command::Poincare => "poincare",
            Command::Bifurcate => "bifurcate",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    FieldHeatmap,
    VectorQuiver,
    PoincareScatter,
    BifurcationScatter,
}

/// Fully resolved job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    pub model: ModelParams,
    pub region: Region,
    /// Grid points along x and k.
    pub resolution: (usize, usize),
    pub output: String,
    pub format: Format,
    /// SVG written next to the data file when set.
    pub plot: Option<PlotKind>,
    pub envelope: f64,
    pub seed_resolution: usize,
    pub bracket: (f64, f64),
    pub start: PhasePoint,
    pub n_returns: usize,
    pub param: BifurcationParam,
    pub param_range: (f64, f64),
    pub param_resolution: usize,
    pub eps: f64,
    pub n_total: usize,
    pub n_discard: usize,
    pub record_count: usize,
}

/// Every field optional; the shape of the config file and of the flag set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub model: Option<PartialModel>,
    pub region: Option<Region>,
    pub resolution: Option<(usize, usize)>,
    pub output: Option<String>,
    pub format: Option<Format>,
    pub plot: Option<PlotKind>,
    pub envelope: Option<f64>,
    pub seed_resolution: Option<usize>,
    pub bracket: Option<(f64, f64)>,
    pub start: Option<PhasePoint>,
    pub n_returns: Option<usize>,
    pub param: Option<BifurcationParam>,
    pub param_range: Option<(f64, f64)>,
    pub param_resolution: Option<usize>,
    pub eps: Option<f64>,
    pub n_total: Option<usize>,
    pub n_discard: Option<usize>,
    pub record_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialModel {
    pub a: Option<f64>,
    pub alpha: Option<f64>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl PartialConfig {
    /// Parses a config file; syntax errors carry line and column.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: PartialConfig) -> Self {
        let model = match (self.model, top.model) {
            (Some(mut base), Some(t)) => {
                overlay!(base, t, a, alpha);
                Some(base)
            }
            (base, t) => t.or(base),
        };
        overlay!(
            self,
            top,
            command,
            region,
            resolution,
            output,
            format,
            plot,
            envelope,
            seed_resolution,
            bracket,
            start,
            n_returns,
            param,
            param_range,
            param_resolution,
            eps,
            n_total,
            n_discard,
            record_count
        );
        self.model = model;
        self
    }

    /// Fills defaults and validates every field.
    pub fn resolve(self) -> Result<JobConfig, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("command: missing".into()))?;
        let format = self.format.unwrap_or(match command {
            Command::Flow | Command::Poincare => Format::Csv,
            _ => Format::Json,
        });
        let param = self.param.unwrap_or(BifurcationParam::A);
        let record_count = self.record_count.unwrap_or(DEFAULT_RECORD_COUNT);
        let n_total = self.n_total.unwrap_or(DEFAULT_N_TOTAL);
        let model = self.model.unwrap_or_default();
        // trajectories default to the classical field, field queries to alpha = 1
        let default_alpha = match command {
            Command::Bifurcate | Command::Poincare => 0.0,
            _ => 1.0,
        };
        let cfg = JobConfig {
            command,
            model: ModelParams {
                a: model.a.unwrap_or(1.0),
                alpha: model.alpha.unwrap_or(default_alpha),
            },
            region: self.region.unwrap_or(Region::square(1.5)),
            resolution: self.resolution.unwrap_or((301, 301)),
            output: self
                .output
                .unwrap_or_else(|| format!("{}.{}", command.name(), format.extension())),
            format,
            plot: self.plot,
            envelope: self.envelope.unwrap_or(DEFAULT_ENVELOPE),
            seed_resolution: self.seed_resolution.unwrap_or(DEFAULT_SEED_RESOLUTION),
            bracket: self.bracket.unwrap_or((1.5, 2.2)),
            start: self.start.unwrap_or(DEFAULT_START),
            n_returns: self.n_returns.unwrap_or(20),
            param,
            param_range: self.param_range.unwrap_or(match param {
                BifurcationParam::A => (0.8, 1.3),
                BifurcationParam::Alpha => (0.05, 3.0),
            }),
            param_resolution: self.param_resolution.unwrap_or(50),
            eps: self.eps.unwrap_or(match param {
                BifurcationParam::A => DEFAULT_EPS_A,
                BifurcationParam::Alpha => DEFAULT_EPS_ALPHA,
            }),
            n_total,
            n_discard: self
                .n_discard
                .unwrap_or(n_total.saturating_sub(record_count)),
            record_count,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(|e| field_error("model", e))?;
        if self.output.is_empty() {
            return Err(field_error("output", "empty path"));
        }
        match self.command {
            Command::Flow => {
                self.region
                    .validate()
                    .map_err(|e| field_error("region", e))?;
                if self.model.is_classical() {
                    return Err(field_error("model.alpha", "flow grids need alpha > 0"));
                }
                if self.resolution.0 < 2 || self.resolution.1 < 2 {
                    return Err(field_error("resolution", "at least 2 points per axis"));
                }
                self.check_plot(&[PlotKind::FieldHeatmap, PlotKind::VectorQuiver])
            }
            Command::Stagnation => {
                self.region
                    .validate()
                    .map_err(|e| field_error("region", e))?;
                if !(self.envelope.is_finite() && self.envelope > 0.0) {
                    return Err(field_error("envelope", "must be positive"));
                }
                if self.seed_resolution < 3 {
                    return Err(field_error("seed_resolution", "at least 3"));
                }
                self.check_plot(&[])
            }
            Command::Onset => {
                let (lo, hi) = self.bracket;
                if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                    return Err(field_error(
                        "bracket",
                        format!("need 0 <= lo < hi, got [{lo}, {hi}]"),
                    ));
                }
                self.check_plot(&[])
            }
            Command::Poincare => {
                if !self.start.is_finite() {
                    return Err(field_error("start", "must be finite"));
                }
                if self.n_returns == 0 {
                    return Err(field_error("n_returns", "at least 1"));
                }
                self.check_plot(&[PlotKind::PoincareScatter])
            }
            Command::Bifurcate => {
                self.scan_config()
                    .validate()
                    .map_err(|e| field_error("scan", e))?;
                self.check_plot(&[PlotKind::BifurcationScatter])
            }
            Command::Validate => self.check_plot(&[]),
        }
    }

    fn check_plot(&self, allowed: &[PlotKind]) -> Result<(), CliError> {
        match self.plot {
            Some(kind) if !allowed.contains(&kind) => Err(field_error(
                "plot",
                format!("{kind:?} is not available for {}", self.command.name()),
            )),
            _ => Ok(()),
        }
    }

    pub fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            param: self.param,
            range: self.param_range,
            resolution: self.param_resolution,
            base: self.model,
            eps: self.eps,
            n_total: self.n_total,
            n_discard: self.n_discard,
            record_count: self.record_count,
            start: self.start,
        }
    }
}
