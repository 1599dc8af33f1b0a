//! Batch front end for the `wigner-lv` toolkit.
//!
//! Each invocation runs one job (`flow`, `stagnation`, `onset`, `poincare`,
//! `bifurcate` or `validate`), writes its data file, an optional SVG plot and
//! a manifest recording the resolved configuration, the tool version and the
//! SHA-256 of every output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical fault, 4 I/O error.

pub mod args;
pub mod config;
pub mod output;
pub mod svg;
pub mod validate;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use serde_json::json;
use wigner_lv::dynamics::{bifurcation_scan, poincare};
use wigner_lv::equilibria::{find_stagnation_points, saddle_onset_alpha};
use wigner_lv::flow::sample_grid;

use crate::args::Cli;
use crate::config::{Command, Format, JobConfig, PartialConfig, PlotKind};
use crate::output::{
    csv_text, json_text, manifest_path, num, svg_path, write_output, Manifest, OutputEntry,
};
use crate::svg::SvgData;

/// Environment variable capping the worker threads; `0` or unset means automatic.
pub const THREADS_ENV: &str = "WIGNER_LV_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<wigner_lv::Error> for CliError {
    fn from(e: wigner_lv::Error) -> Self {
        match e {
            wigner_lv::Error::InvalidParameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parses arguments, runs the job and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads()
        .and_then(|()| load(cli))
        .and_then(|cfg| run(&cfg))
    {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV}: expected a non-negative integer, got `{v}`"
            ))
        })?,
        Err(_) => 0,
    };
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Resolves defaults, the config file and the flags, in rising precedence.
pub fn load(cli: Cli) -> Result<JobConfig, CliError> {
    let flags = cli.command.into_partial();
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let file = PartialConfig::from_json(&text, path)?;
            if let (Some(from_file), Some(from_flags)) = (file.command, flags.command) {
                if from_file != from_flags {
                    eprintln!(
                        "warning: config file command `{}` overridden by `{}`",
                        from_file.name(),
                        from_flags.name()
                    );
                }
            }
            file
        }
        None => PartialConfig::default(),
    };
    base.overlay(flags).resolve()
}

/// What a job produced before it is written out.
struct JobOutput {
    data: Vec<u8>,
    svg: Option<String>,
    summary: serde_json::Value,
}

/// Executes a resolved job and writes data, plot and manifest.
pub fn run(cfg: &JobConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let job = match cfg.command {
        Command::Flow => flow(cfg)?,
        Command::Stagnation => stagnation(cfg)?,
        Command::Onset => onset(cfg)?,
        Command::Poincare => poincare_job(cfg)?,
        Command::Bifurcate => bifurcate(cfg)?,
        Command::Validate => validate(cfg)?,
    };
    let out = Path::new(&cfg.output);
    let mut outputs: Vec<OutputEntry> = vec![write_output(out, &job.data)?];
    match (cfg.plot, job.svg) {
        (Some(_), Some(svg)) => outputs.push(write_output(&svg_path(out), svg.as_bytes())?),
        (Some(_), None) => eprintln!(
            "warning: nothing to plot, {} not written",
            svg_path(out).display()
        ),
        _ => {}
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        outputs,
        summary: job.summary.clone(),
    };
    write_output(&manifest_path(out), &json_text(&manifest)?)?;
    if cfg.command == Command::Validate && job.summary["failed"].as_u64().unwrap_or(0) > 0 {
        return Err(CliError::Numerical("validation checks failed".into()));
    }
    Ok(())
}

fn plot(data: &SvgData) -> Option<String> {
    svg::render(data)
}

fn flow(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let (nx, nk) = cfg.resolution;
    let samples = sample_grid(cfg.region, cfg.resolution, cfg.model)?;
    let data = match cfg.format {
        Format::Csv => csv_text(
            &["x", "k", "G", "Jx", "Jk", "wx", "wk", "divJ", "divw"],
            samples.iter().map(|s| {
                [
                    s.point.x,
                    s.point.k,
                    s.wigner,
                    s.current[0],
                    s.current[1],
                    s.velocity[0],
                    s.velocity[1],
                    s.div_j,
                    s.div_w,
                ]
                .into_iter()
                .map(num)
                .collect()
            }),
        )?,
        Format::Json => json_text(&samples)?,
    };
    let svg = match cfg.plot {
        Some(PlotKind::VectorQuiver) => plot(&SvgData::VectorQuiver {
            samples: &samples,
            nx,
            nk,
        }),
        Some(_) => plot(&SvgData::FieldHeatmap {
            samples: &samples,
            nx,
            nk,
        }),
        None => None,
    };
    Ok(JobOutput {
        data,
        svg,
        summary: json!({ "samples": samples.len() }),
    })
}

fn stagnation(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let search = find_stagnation_points(cfg.region, cfg.model, cfg.seed_resolution, cfg.envelope)?;
    if search.dropped_seeds > 0 {
        eprintln!(
            "note: {} of {} seeds did not converge inside the region",
            search.dropped_seeds, search.seeds
        );
    }
    let data = match cfg.format {
        Format::Json => json_text(&search.points)?,
        Format::Csv => csv_text(
            &["x", "k", "trace", "det", "delta", "kind", "winding"],
            search.points.iter().map(|r| {
                vec![
                    num(r.point.x),
                    num(r.point.k),
                    num(r.jac.trace),
                    num(r.jac.det),
                    num(r.jac.delta),
                    r.kind.label().to_string(),
                    r.winding.to_string(),
                ]
            }),
        )?,
    };
    let summary = json!({
        "points": search.points.len(),
        "saddles": search.points.iter().filter(|r| r.jac.det < 0.0).count(),
        "seeds": search.seeds,
        "dropped_seeds": search.dropped_seeds,
    });
    Ok(JobOutput {
        data,
        svg: None,
        summary,
    })
}

fn onset(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let alpha = saddle_onset_alpha(cfg.model.a, cfg.bracket)?;
    let record = json!({ "a": cfg.model.a, "bracket": [cfg.bracket.0, cfg.bracket.1], "onset_alpha": alpha });
    let data = match cfg.format {
        Format::Json => json_text(&record)?,
        Format::Csv => csv_text(&["a", "onset_alpha"], [vec![num(cfg.model.a), num(alpha)]])?,
    };
    Ok(JobOutput {
        data,
        svg: None,
        summary: record,
    })
}

fn poincare_job(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let section = poincare(cfg.start, cfg.model, cfg.n_returns)?;
    if section.diverged {
        eprintln!(
            "warning: trajectory left the divergence bound after {} samples",
            section.points.len()
        );
    }
    let data = match cfg.format {
        Format::Json => json_text(&section)?,
        Format::Csv => csv_text(
            &["index", "tau", "x", "k", "radius"],
            section.points.iter().enumerate().map(|(i, p)| {
                vec![
                    i.to_string(),
                    num(i as f64 * section.stride_time),
                    num(p.x),
                    num(p.k),
                    num(p.distance(&section.center)),
                ]
            }),
        )?,
    };
    let svg = cfg
        .plot
        .and_then(|_| plot(&SvgData::PoincareScatter(&section)));
    let summary = json!({
        "period": section.period,
        "stride_time": section.stride_time,
        "points": section.points.len(),
        "diverged": section.diverged,
    });
    Ok(JobOutput { data, svg, summary })
}

fn bifurcate(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let scan = cfg.scan_config();
    let records = bifurcation_scan(&scan)?;
    let data = match cfg.format {
        Format::Json => json_text(&records)?,
        Format::Csv => {
            let mut rows = vec![];
            for r in &records {
                if r.diverged {
                    rows.push(vec![
                        num(r.param_value),
                        "1".into(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]);
                }
                for (i, (x, k)) in r.attractor_x.iter().zip(&r.attractor_k).enumerate() {
                    rows.push(vec![
                        num(r.param_value),
                        "0".into(),
                        i.to_string(),
                        num(*x),
                        num(*k),
                    ]);
                }
            }
            csv_text(&["param_value", "diverged", "index", "x", "k"], rows)?
        }
    };
    let svg = cfg.plot.and_then(|_| {
        plot(&SvgData::BifurcationScatter {
            records: &records,
            param: cfg.param,
        })
    });
    let summary = json!({
        "records": records.len(),
        "diverged": records.iter().filter(|r| r.diverged).count(),
    });
    Ok(JobOutput { data, svg, summary })
}

fn validate(cfg: &JobConfig) -> Result<JobOutput, CliError> {
    let checks = validate::run_checks();
    println!("{}", validate::table(&checks));
    let failed = checks.iter().filter(|c| !c.passed).count();
    let data = match cfg.format {
        Format::Json => json_text(&checks)?,
        Format::Csv => csv_text(
            &["check", "value", "tolerance", "passed"],
            checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    num(c.value),
                    num(c.tolerance),
                    c.passed.to_string(),
                ]
            }),
        )?,
    };
    Ok(JobOutput {
        data,
        svg: None,
        summary: json!({ "checks": checks.len(), "failed": failed }),
    })
}
