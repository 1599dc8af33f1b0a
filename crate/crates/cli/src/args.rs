//! Flag parsing. Every flag is optional so that a config file can supply it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use wigner_lv::{BifurcationParam, PhasePoint, Region};

use crate::config::{Command, Format, PartialConfig, PartialModel, PlotKind};

#[derive(Debug, Parser)]
#[command(
    name = "wigner-lv",
    version,
    about = "Quantum Lotka-Volterra Wigner-flow toolkit"
)]
pub struct Cli {
    /// JSON job file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Anisotropy a > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Gaussian localization alpha >= 0 (0 selects the classical field).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Data file; the manifest and plot are written beside it.
    #[arg(long, short)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG plot of this kind.
    #[arg(long, value_enum)]
    pub plot: Option<PlotKind>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Currents, velocities and divergences on a grid.
    Flow {
        #[command(flatten)]
        common: Common,
        /// x_min:x_max:k_min:k_max
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        region: Option<Region>,
        /// Points per axis, `N` or `NXxNK`.
        #[arg(long, value_parser = parse_resolution)]
        res: Option<(usize, usize)>,
    },
    /// Stagnation points with their Jacobian classification.
    Stagnation {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        region: Option<Region>,
        /// Seed where |w| falls below this.
        #[arg(long)]
        envelope: Option<f64>,
        /// Seed lattice points per axis.
        #[arg(long)]
        seed_res: Option<usize>,
    },
    /// alpha at which the primary equilibrium turns into a saddle.
    Onset {
        #[command(flatten)]
        common: Common,
        /// lo:hi
        #[arg(long, value_parser = parse_pair)]
        bracket: Option<(f64, f64)>,
    },
    /// Quarter-period Poincaré section.
    Poincare {
        #[command(flatten)]
        common: Common,
        /// x:k
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Option<PhasePoint>,
        /// Number of full returns; four section points per return.
        #[arg(long)]
        returns: Option<usize>,
    },
    /// Discrete-map bifurcation scan over a or alpha.
    Bifurcate {
        #[command(flatten)]
        common: Common,
        /// `a` or `alpha`.
        #[arg(long, value_parser = parse_param)]
        param: Option<BifurcationParam>,
        /// lo:hi
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        /// Number of parameter values.
        #[arg(long)]
        steps: Option<usize>,
        /// Euler step of the discrete map.
        #[arg(long)]
        eps: Option<f64>,
        /// Map iterations per parameter value.
        #[arg(long)]
        n_total: Option<usize>,
        /// Leading iterations discarded as transient.
        #[arg(long)]
        n_discard: Option<usize>,
        /// Trailing iterates recorded.
        #[arg(long)]
        record_count: Option<usize>,
        /// Initial point x:k.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Option<PhasePoint>,
    },
    /// Built-in oracle checks with a pass/fail table.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != n {
        return Err(format!("expected {n} colon-separated numbers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

pub fn parse_region(s: &str) -> Result<Region, String> {
    let v = floats(s, 4)?;
    Ok(Region::new(v[0], v[1], v[2], v[3]))
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = floats(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn parse_point(s: &str) -> Result<PhasePoint, String> {
    let v = floats(s, 2)?;
    Ok(PhasePoint::new(v[0], v[1]))
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let parse = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

pub fn parse_param(s: &str) -> Result<BifurcationParam, String> {
    match s {
        "a" => Ok(BifurcationParam::A),
        "alpha" => Ok(BifurcationParam::Alpha),
        _ => Err(format!("expected `a` or `alpha`, got `{s}`")),
    }
}

impl Common {
    fn partial(self, command: Command) -> PartialConfig {
        let model = (self.a.is_some() || self.alpha.is_some()).then_some(PartialModel {
            a: self.a,
            alpha: self.alpha,
        });
        PartialConfig {
            command: Some(command),
            model,
            output: self.out,
            format: self.format,
            plot: self.plot,
            ..Default::default()
        }
    }
}

impl Sub {
    /// The flags as a config layer.
    pub fn into_partial(self) -> PartialConfig {
        match self {
            Sub::Flow {
                common,
                region,
                res,
            } => PartialConfig {
                region,
                resolution: res,
                ..common.partial(Command::Flow)
            },
            Sub::Stagnation {
                common,
                region,
                envelope,
                seed_res,
            } => PartialConfig {
                region,
                envelope,
                seed_resolution: seed_res,
                ..common.partial(Command::Stagnation)
            },
            Sub::Onset { common, bracket } => PartialConfig {
                bracket,
                ..common.partial(Command::Onset)
            },
            Sub::Poincare {
                common,
                start,
                returns,
            } => PartialConfig {
                start,
                n_returns: returns,
                ..common.partial(Command::Poincare)
            },
            Sub::Bifurcate {
                common,
                param,
                range,
                steps,
                eps,
                n_total,
                n_discard,
                record_count,
                start,
            } => PartialConfig {
                param,
                param_range: range,
                param_resolution: steps,
                eps,
                n_total,
                n_discard,
                record_count,
                start,
                ..common.partial(Command::Bifurcate)
            },
            Sub::Validate { common } => common.partial(Command::Validate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_compound_values() {
        assert_eq!(
            parse_region("-1.5:1.5:-1:2").unwrap(),
            Region::new(-1.5, 1.5, -1.0, 2.0)
        );
        assert_eq!(parse_resolution("301").unwrap(), (301, 301));
        assert_eq!(parse_resolution("10x20").unwrap(), (10, 20));
        assert_eq!(parse_point("0.3:0").unwrap(), PhasePoint::new(0.3, 0.0));
        assert!(parse_region("1:2:3").is_err());
        assert!(parse_param("beta").is_err());
    }

    #[test]
    fn flags_become_a_partial_config() {
        let cli = Cli::try_parse_from([
            "wigner-lv",
            "flow",
            "--a",
            "2",
            "--region",
            "-1:1:-1:1",
            "--res",
            "5",
        ])
        .unwrap();
        let p = cli.command.into_partial();
        assert_eq!(p.command, Some(Command::Flow));
        assert_eq!(
            p.model,
            Some(PartialModel {
                a: Some(2.0),
                alpha: None
            })
        );
        assert_eq!(p.resolution, Some((5, 5)));
    }
}
