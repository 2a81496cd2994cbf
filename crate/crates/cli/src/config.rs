//! Run configuration: a JSON file (unknown keys rejected) overlaid with
//! command-line flags.

use henon_core::{MapParams, Nonlinearity, Result as CoreResult, State};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub f: Nonlinearity,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub a: Vec<f64>,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            f: Nonlinearity::Quadratic { mu: 1.4 },
            b: 0.3,
            a: Vec::new(),
        }
    }
}

impl MapConfig {
    pub fn params(&self) -> CoreResult<MapParams> {
        MapParams::new(self.f.clone(), self.b, self.a.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    pub transient: usize,
    pub points: usize,
    pub x0: f64,
    /// Initial y; zeros when absent.
    pub y0: Option<Vec<f64>>,
    /// Emit the running largest-Lyapunov-exponent column.
    pub lle: bool,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            transient: 1000,
            points: 100_000,
            x0: 0.0,
            y0: None,
            lle: true,
        }
    }
}

/// An explicit domain to check instead of the analytic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyOptions {
    /// Random samples for the one-step checks.
    pub samples: usize,
    /// The oracle runs `grid_density^2` seeds.
    pub grid_density: usize,
    pub iterations: usize,
    pub domain: Option<DomainSpec>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            samples: 10_000,
            grid_density: 100,
            iterations: 1000,
            domain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HorseshoeOptions {
    pub lines: usize,
    pub points: usize,
    /// y-radius of the box; derived from `b` when absent.
    pub gamma: Option<f64>,
    /// Extra arc CSV written next to the report.
    pub arcs: Option<PathBuf>,
    pub arc_lines: usize,
    pub arc_points: usize,
}

impl Default for HorseshoeOptions {
    fn default() -> Self {
        HorseshoeOptions {
            lines: 100,
            points: 10_000,
            gamma: None,
            arcs: None,
            arc_lines: 5,
            arc_points: 1000,
        }
    }
}

/// Grid `mu_i = mu_min + (mu_max - mu_min) i / mu_steps` for `i = 1..=mu_steps`
/// (left end excluded) by `b_j = b_min + (b_max - b_min) j / (b_steps - 1)`
/// for `j = 0..b_steps` (both ends included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_steps: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub b_steps: usize,
    /// Steps from the origin used to label uncertified cells as escaped.
    pub escape_iterations: usize,
    /// Run the brute-force oracle on every certified cell.
    pub verify: bool,
    pub grid_density: usize,
    pub oracle_iterations: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mu_min: 0.0,
            mu_max: 2.2,
            mu_steps: 50,
            b_min: 0.0,
            b_max: 0.5,
            b_steps: 50,
            escape_iterations: 1000,
            verify: false,
            grid_density: 20,
            oracle_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    /// Point at which the Jacobian is taken.
    pub x: f64,
    /// A cycle whose multipliers are wanted instead.
    pub orbit: Option<Vec<State>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinueOptions {
    pub period_max: usize,
    pub b_target: f64,
    pub steps: usize,
    /// Search interval for the `b = 0` cycles; covers every bounded orbit
    /// when absent.
    pub interval: Option<(f64, f64)>,
}

impl Default for ContinueOptions {
    fn default() -> Self {
        ContinueOptions {
            period_max: 4,
            b_target: 1e-3,
            steps: 10,
            interval: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub map: MapConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Thread count; all outputs are independent of it.
    pub workers: Option<usize>,
    pub simulate: SimulateOptions,
    pub certify: CertifyOptions,
    pub horseshoe: HorseshoeOptions,
    pub sweep: SweepOptions,
    pub spectrum: SpectrumOptions,
    #[serde(rename = "continue")]
    pub continuation: ContinueOptions,
}
