use crate::config::{Format, RunConfig};
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::orbits::{continue_in_b, default_interval, find_1d_orbits, structural_stability};
use henon_core::{HenonError, PeriodicOrbit};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRun {
    pub period: usize,
    pub status: &'static str,
    pub error: Option<String>,
    /// Largest `b` reached.
    pub b_reached: f64,
    pub history: Vec<PeriodicOrbit>,
}

fn status_of(e: &HenonError) -> &'static str {
    match e {
        HenonError::MultiplierCollision { .. } => "multiplier-collision",
        HenonError::NewtonDivergence { .. } => "newton-divergence",
        HenonError::NotStructurallyStable { .. } => "not-structurally-stable",
        _ => "error",
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = &cfg.continuation;
    let p = cfg.map.params()?;
    let p0 = p.with_b(0.0)?;
    let interval = o.interval.unwrap_or_else(|| default_interval(p.f()));
    let orbits = find_1d_orbits(p.f(), o.period_max, interval, p.n())?;

    let runs: Vec<OrbitRun> = orbits
        .par_iter()
        .map(|orbit| {
            if !structural_stability(orbit) {
                return OrbitRun {
                    period: orbit.period,
                    status: "not-structurally-stable",
                    error: None,
                    b_reached: 0.0,
                    history: vec![orbit.clone()],
                };
            }
            match continue_in_b(&p0, orbit, o.b_target, o.steps) {
                Ok(history) => OrbitRun {
                    period: orbit.period,
                    status: "ok",
                    error: None,
                    b_reached: history.last().map_or(0.0, |h| h.b_value),
                    history,
                },
                Err(f) => OrbitRun {
                    period: orbit.period,
                    status: status_of(&f.error),
                    error: Some(f.error.to_string()),
                    b_reached: f.partial.last().map_or(0.0, |h| h.b_value),
                    history: f.partial,
                },
            }
        })
        .collect();

    let body = match cfg.format {
        Format::Json => pretty(&json!({ "map": p, "b_target": o.b_target, "orbits": runs }))?,
        Format::Csv => {
            let n = p.n();
            let mut header: Vec<String> = ["orbit", "period", "status", "step", "b", "residual", "point", "x"]
                .map(String::from)
                .to_vec();
            header.extend((1..=n).map(|i| format!("y{i}")));
            header.extend((1..=n + 1).map(|i| format!("modulus{i}")));
            let mut t = Table::new(&header)?;
            for (k, r) in runs.iter().enumerate() {
                for (step, h) in r.history.iter().enumerate() {
                    let moduli: Vec<String> = h.multiplier_moduli().into_iter().map(num).collect();
                    for (i, s) in h.points.iter().enumerate() {
                        let mut row = vec![
                            k.to_string(),
                            r.period.to_string(),
                            r.status.to_string(),
                            step.to_string(),
                            num(h.b_value),
                            num(h.residual),
                            i.to_string(),
                            num(s.x),
                        ];
                        row.extend(s.y.iter().map(|v| num(*v)));
                        row.extend(moduli.iter().cloned());
                        t.row(row)?;
                    }
                }
            }
            t.finish()?
        }
    };

    let stable = runs.iter().filter(|r| r.status != "not-structurally-stable").count();
    let reached = runs.iter().filter(|r| r.status == "ok").count();
    let summary = json!({
        "command": "continue",
        "orbits": runs.len(),
        "structurally_stable": stable,
        "reached_target": reached,
    });
    Ok(Outcome {
        body,
        summary,
        passed: reached == stable,
    })
}
