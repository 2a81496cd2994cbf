//! `henon` command-line front end. Every command reads a [`RunConfig`],
//! applies flag overrides and produces a deterministic body (CSV or JSON)
//! plus a one-line JSON summary.

pub mod commands;
pub mod config;
pub mod lyapunov;
mod output;

use clap::{Args, Parser, Subcommand};
pub use config::{Format, RunConfig};
use henon_core::{HenonError, Nonlinearity};
use serde_json::{json, Value};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "henon", version, about = "Certificates, sweeps and orbit continuation for Hénon-like maps")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Nonlinearity family: quadratic (mu - x^2) or cubic (x^3 - mu x).
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Polynomial coefficients, lowest degree first (selects a general f).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Shift coefficients a_1..a_{n-1}; an empty string means n = 1.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<String>>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the map and emit the attractor point cloud.
    Simulate(SimulateArgs),
    /// Analytic trapping-domain certificate checked against the oracles.
    Certify(CertifyArgs),
    /// Horseshoe condition and covering check.
    Horseshoe(HorseshoeArgs),
    /// Label a (mu, b) grid by which certificate applies.
    Sweep(SweepArgs),
    /// Characteristic polynomial and its roots, or cycle multipliers.
    Spectrum(SpectrumArgs),
    /// Find b = 0 cycles and continue them in b.
    Continue(ContinueArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub transient: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Drop the Lyapunov column.
    #[arg(long)]
    pub no_lle: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub grid_density: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HorseshoeArgs {
    #[arg(long)]
    pub lines: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also write the sampled arcs as CSV to this path.
    #[arg(long)]
    pub arcs: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_max: Option<f64>,
    #[arg(long)]
    pub mu_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_max: Option<f64>,
    #[arg(long)]
    pub b_steps: Option<usize>,
    /// Run the brute-force oracle on certified cells.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContinueArgs {
    #[arg(long)]
    pub period_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_target: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] HenonError),
    #[error("invalid configuration: {message}")]
    Config {
        message: String,
        constraint: Option<String>,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn config(message: impl Into<String>, constraint: impl Into<Option<String>>) -> Self {
        CliError::Config {
            message: message.into(),
            constraint: constraint.into(),
        }
    }

    /// Machine-readable description for stderr.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.to_string() });
        match self {
            CliError::Model(e) => {
                v["constraint"] = json!(e.constraint());
                if let HenonError::InvalidParameter { name, value, .. } = e {
                    v["parameter"] = json!(name);
                    v["value"] = json!(value);
                }
            }
            CliError::Config { constraint, .. } => v["constraint"] = json!(constraint),
            _ => {}
        }
        v
    }
}

/// Result of a command: the body for `--out`/stdout, a summary for stderr
/// and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub summary: Value,
    pub passed: bool,
}

/// Loads the config file (if any) and applies every flag override.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::config(e.to_string(), Some("known keys and types only".to_string())))?
        }
        None => RunConfig::default(),
    };

    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(o) = &g.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(w) = g.workers {
        if w == 0 {
            return Err(CliError::config("workers must be positive", Some("workers >= 1".to_string())));
        }
        cfg.workers = Some(w);
    }
    apply_map_overrides(&mut cfg, g)?;

    match &cli.command {
        Command::Simulate(a) => {
            let s = &mut cfg.simulate;
            set(&mut s.transient, a.transient);
            set(&mut s.points, a.points);
            set(&mut s.x0, a.x0);
            if a.no_lle {
                s.lle = false;
            }
        }
        Command::Certify(a) => {
            let c = &mut cfg.certify;
            set(&mut c.samples, a.samples);
            set(&mut c.grid_density, a.grid_density);
            set(&mut c.iterations, a.iterations);
        }
        Command::Horseshoe(a) => {
            let h = &mut cfg.horseshoe;
            set(&mut h.lines, a.lines);
            set(&mut h.points, a.points);
            if a.gamma.is_some() {
                h.gamma = a.gamma;
            }
            if a.arcs.is_some() {
                h.arcs = a.arcs.clone();
            }
        }
        Command::Sweep(a) => {
            let s = &mut cfg.sweep;
            set(&mut s.mu_min, a.mu_min);
            set(&mut s.mu_max, a.mu_max);
            set(&mut s.mu_steps, a.mu_steps);
            set(&mut s.b_min, a.b_min);
            set(&mut s.b_max, a.b_max);
            set(&mut s.b_steps, a.b_steps);
            if a.verify {
                s.verify = true;
            }
        }
        Command::Spectrum(a) => set(&mut cfg.spectrum.x, a.x),
        Command::Continue(a) => {
            let c = &mut cfg.continuation;
            set(&mut c.period_max, a.period_max);
            set(&mut c.b_target, a.b_target);
            set(&mut c.steps, a.steps);
        }
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_map_overrides(cfg: &mut RunConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let m = &mut cfg.map;
    if let Some(c) = &g.coeffs {
        m.f = Nonlinearity::Polynomial { coeffs: c.clone() };
    }
    if let Some(kind) = &g.kind {
        let mu = m.f.mu().unwrap_or(0.0);
        m.f = match kind.as_str() {
            "quadratic" => Nonlinearity::Quadratic { mu },
            "cubic" => Nonlinearity::Cubic { mu },
            other => {
                return Err(CliError::config(
                    format!("unknown kind {other:?}"),
                    Some("kind in {quadratic, cubic}".to_string()),
                ))
            }
        };
    }
    if let Some(mu) = g.mu {
        m.f = match &m.f {
            Nonlinearity::Quadratic { .. } => Nonlinearity::Quadratic { mu },
            Nonlinearity::Cubic { .. } => Nonlinearity::Cubic { mu },
            Nonlinearity::Polynomial { .. } => {
                return Err(CliError::config(
                    "--mu needs a quadratic or cubic nonlinearity",
                    Some("kind in {quadratic, cubic}".to_string()),
                ))
            }
        };
    }
    if let Some(b) = g.b {
        m.b = b;
    }
    if let Some(a) = &g.a {
        m.a = a
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::config(format!("bad a_i value {s:?}"), Some("a_i is a number".to_string())))
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(())
}

/// Runs the command on an already resolved configuration, inside a pool of
/// `cfg.workers` threads when given.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run = || match command {
        Command::Simulate(_) => commands::simulate::run(cfg),
        Command::Certify(_) => commands::certify::run(cfg),
        Command::Horseshoe(_) => commands::horseshoe::run(cfg),
        Command::Sweep(_) => commands::sweep::run(cfg),
        Command::Spectrum(_) => commands::spectrum::run(cfg),
        Command::Continue(_) => commands::continuation::run(cfg),
    };
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::config(e.to_string(), None))?
            .install(run),
        None => run(),
    }
}
