use crate::config::{Format, RunConfig, SweepOptions};
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::horseshoe::{horseshoe_condition, horseshoe_gamma};
use henon_core::trapping::{
    brute_force_trap_oracle, cubic_saddle_node_curve, theorem2_certificate, theorem3_certificate, TrappingDomain,
};
use henon_core::{MapParams, Nonlinearity, RunOutcome, State};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    AttractorCertified,
    HorseshoeCertified,
    Escaped,
    None,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::AttractorCertified => "attractor-certified",
            Label::HorseshoeCertified => "horseshoe-certified",
            Label::Escaped => "escaped",
            Label::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub mu: f64,
    pub b: f64,
    pub label: Label,
    pub domain: Option<TrappingDomain>,
    /// Largest `|b|` the attractor certificate allows at this `mu`.
    pub b_bound: Option<f64>,
    /// Cubic only: where the auxiliary maps lose their outer fixed points.
    pub saddle_node_b: Option<f64>,
    pub oracle_passed: Option<bool>,
    pub oracle_escaped: Option<usize>,
}

pub fn grid(o: &SweepOptions) -> Vec<(f64, f64)> {
    let mut cells = Vec::with_capacity(o.mu_steps * o.b_steps);
    for i in 1..=o.mu_steps {
        let mu = o.mu_min + (o.mu_max - o.mu_min) * i as f64 / o.mu_steps as f64;
        for j in 0..o.b_steps {
            let b = if o.b_steps == 1 {
                o.b_min
            } else {
                o.b_min + (o.b_max - o.b_min) * j as f64 / (o.b_steps - 1) as f64
            };
            cells.push((mu, b));
        }
    }
    cells
}

fn family(f: &Nonlinearity, mu: f64) -> Nonlinearity {
    match f {
        Nonlinearity::Cubic { .. } => Nonlinearity::Cubic { mu },
        _ => Nonlinearity::Quadratic { mu },
    }
}

pub fn classify(base: &Nonlinearity, a: &[f64], mu: f64, b: f64, o: &SweepOptions) -> Result<Cell, CliError> {
    let f = family(base, mu);
    let p = MapParams::new(f.clone(), b, a.to_vec())?;
    let a_bound = p.a_bound();
    let (domain, b_bound, saddle_node_b) = match f {
        Nonlinearity::Cubic { mu } => {
            let c = theorem3_certificate(mu, b, a_bound).ok();
            let d = c.as_ref().filter(|c| c.holds).and_then(|c| {
                TrappingDomain::symmetric(c.alpha, c.gamma, henon_core::Certification::Theorem3).ok()
            });
            (d, c.map(|c| c.b_bound), Some(cubic_saddle_node_curve(mu, a_bound)))
        }
        _ => {
            let c = theorem2_certificate(mu, b, a_bound).ok();
            let d = c.as_ref().filter(|c| c.holds).and_then(|c| {
                TrappingDomain::symmetric(c.alpha, c.gamma, henon_core::Certification::Theorem2).ok()
            });
            let bound = (mu > 0.0).then(|| (1.0 - a_bound) * (1.0 - (mu / 2.0).sqrt()));
            (d, bound, None)
        }
    };

    let (mut oracle_passed, mut oracle_escaped) = (None, None);
    let label = if let Some(d) = &domain {
        if o.verify {
            let r = brute_force_trap_oracle(&p, d, o.grid_density, o.oracle_iterations)?;
            oracle_passed = Some(r.passed);
            oracle_escaped = Some(r.escaped);
        }
        Label::AttractorCertified
    } else if matches!(f, Nonlinearity::Quadratic { .. })
        && horseshoe_condition(mu, horseshoe_gamma(mu, b, a_bound)).unwrap_or(false)
    {
        Label::HorseshoeCertified
    } else {
        match p.run(&State::on_axis(0.0, p.n()), o.escape_iterations)? {
            RunOutcome::Escaped { .. } => Label::Escaped,
            RunOutcome::Bounded(_) => Label::None,
        }
    };
    Ok(Cell {
        mu,
        b,
        label,
        domain,
        b_bound,
        saddle_node_b,
        oracle_passed,
        oracle_escaped,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = &cfg.sweep;
    if o.mu_steps == 0 || o.b_steps == 0 {
        return Err(CliError::Config {
            message: "empty sweep grid".into(),
            constraint: Some("mu_steps >= 1 and b_steps >= 1".into()),
        });
    }
    let base = cfg.map.f.clone();
    let cells: Vec<Cell> = grid(o)
        .par_iter()
        .map(|&(mu, b)| classify(&base, &cfg.map.a, mu, b, o))
        .collect::<Result<_, _>>()?;

    let body = match cfg.format {
        Format::Json => pretty(&cells)?,
        Format::Csv => {
            let mut t = Table::new(&[
                "mu",
                "b",
                "label",
                "alpha",
                "gamma",
                "b_bound",
                "saddle_node_b",
                "oracle_passed",
            ])?;
            let opt = |v: Option<f64>| v.map_or(String::new(), num);
            for c in &cells {
                t.row([
                    num(c.mu),
                    num(c.b),
                    c.label.as_str().to_string(),
                    opt(c.domain.as_ref().map(|d| d.alpha())),
                    opt(c.domain.as_ref().map(|d| d.gamma)),
                    opt(c.b_bound),
                    opt(c.saddle_node_b),
                    c.oracle_passed.map_or(String::new(), |v| v.to_string()),
                ])?;
            }
            t.finish()?
        }
    };

    let count = |l: Label| cells.iter().filter(|c| c.label == l).count();
    let failures = cells.iter().filter(|c| c.oracle_passed == Some(false)).count();
    let summary = json!({
        "command": "sweep",
        "cells": cells.len(),
        "attractor_certified": count(Label::AttractorCertified),
        "horseshoe_certified": count(Label::HorseshoeCertified),
        "escaped": count(Label::Escaped),
        "none": count(Label::None),
        "oracle_failures": failures,
    });
    Ok(Outcome {
        body,
        summary,
        passed: failures == 0,
    })
}
