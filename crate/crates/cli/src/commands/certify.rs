use crate::config::{Format, RunConfig};
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::trapping::{
    brute_force_trap_oracle, lemma1_check, sandwich_check, theorem1_certify, theorem2_certificate,
    theorem3_certificate, Certification, TrappingDomain,
};
use henon_core::Nonlinearity;
use serde_json::{json, Value};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.map.params()?;
    let o = &cfg.certify;

    let certificate: Value = match *p.f() {
        Nonlinearity::Quadratic { mu } => match theorem2_certificate(mu, p.b(), p.a_bound()) {
            Ok(c) => json!({ "quadratic": c }),
            Err(e) => json!({ "error": e.to_string(), "constraint": e.constraint() }),
        },
        Nonlinearity::Cubic { mu } => match theorem3_certificate(mu, p.b(), p.a_bound()) {
            Ok(c) => json!({ "cubic": c }),
            Err(e) => json!({ "error": e.to_string(), "constraint": e.constraint() }),
        },
        Nonlinearity::Polynomial { .. } => Value::Null,
    };

    let domain: Option<TrappingDomain> = match &o.domain {
        Some(spec) => {
            let general = theorem1_certify(p.f(), spec.alpha_minus, spec.alpha_plus, spec.gamma);
            let by = if general {
                Certification::Theorem1General
            } else {
                Certification::OracleOnly
            };
            Some(TrappingDomain::new(spec.alpha_minus, spec.alpha_plus, spec.gamma, by)?)
        }
        None => super::analytic_domain(&p).ok().flatten(),
    };

    let (lemma1, sandwich, oracle) = match &domain {
        Some(d) => (
            Some(lemma1_check(&p, d, o.samples, cfg.seed)?),
            Some(sandwich_check(&p, d, o.samples, cfg.seed.wrapping_add(1))?),
            Some(brute_force_trap_oracle(&p, d, o.grid_density, o.iterations)?),
        ),
        None => (None, None, None),
    };

    let certified = domain.as_ref().is_some_and(|d| d.is_certified());
    let checks_pass = lemma1.as_ref().is_none_or(|r| r.passed)
        && sandwich.as_ref().is_none_or(|r| r.passed)
        && oracle.as_ref().is_none_or(|r| r.passed);
    let passed = certified && checks_pass;

    let body = match cfg.format {
        Format::Json => pretty(&json!({
            "map": p,
            "certificate": certificate,
            "domain": domain,
            "lemma1": lemma1,
            "sandwich": sandwich,
            "oracle": oracle,
            "passed": passed,
        }))?,
        Format::Csv => {
            let mut t = Table::new(&[
                "certified_by",
                "alpha_minus",
                "alpha_plus",
                "gamma",
                "lemma1_passed",
                "sandwich_passed",
                "oracle_passed",
                "oracle_escaped",
                "worst_x_margin",
                "worst_y_margin",
            ])?;
            let flag = |b: Option<bool>| b.map_or(String::new(), |v| v.to_string());
            t.row([
                domain
                    .as_ref()
                    .map_or("none".to_string(), |d| format!("{:?}", d.certified_by)),
                domain.as_ref().map_or(String::new(), |d| num(d.alpha_minus)),
                domain.as_ref().map_or(String::new(), |d| num(d.alpha_plus)),
                domain.as_ref().map_or(String::new(), |d| num(d.gamma)),
                flag(lemma1.as_ref().map(|r| r.passed)),
                flag(sandwich.as_ref().map(|r| r.passed)),
                flag(oracle.as_ref().map(|r| r.passed)),
                oracle.as_ref().map_or(String::new(), |r| r.escaped.to_string()),
                oracle.as_ref().map_or(String::new(), |r| num(r.worst_x_margin)),
                oracle.as_ref().map_or(String::new(), |r| num(r.worst_y_margin)),
            ])?;
            t.finish()?
        }
    };

    let summary = json!({
        "command": "certify",
        "certified": certified,
        "checks_passed": checks_pass,
        "oracle_escaped": oracle.as_ref().map(|r| r.escaped),
    });
    Ok(Outcome { body, summary, passed })
}
