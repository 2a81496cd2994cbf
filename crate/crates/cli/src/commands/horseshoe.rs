use crate::config::{Format, RunConfig};
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::horseshoe::{arc_points, horseshoe_gamma, horseshoe_lines, verify_covering_with_gamma};
use henon_core::{HenonError, MapParams, Nonlinearity};
use serde_json::json;

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.map.params()?;
    let o = &cfg.horseshoe;
    let mu = match *p.f() {
        Nonlinearity::Quadratic { mu } => mu,
        _ => return Err(HenonError::NotQuadratic.into()),
    };
    let gamma = o.gamma.unwrap_or_else(|| horseshoe_gamma(mu, p.b(), p.a_bound()));
    let report = verify_covering_with_gamma(&p, gamma, o.lines, o.points)?;
    let arcs = arcs_csv(&p, mu, gamma, o.arc_lines, o.arc_points)?;
    if let Some(path) = &o.arcs {
        std::fs::write(path, &arcs)?;
    }
    let body = match cfg.format {
        Format::Json => pretty(&report)?,
        Format::Csv => arcs,
    };
    let summary = json!({
        "command": "horseshoe",
        "condition_holds": report.condition_holds,
        "covering_verified": report.covering_verified,
        "strip_gap": report.strip_gap,
        "failure": report.failure,
    });
    Ok(Outcome {
        body,
        summary,
        passed: report.condition_holds && report.covering_verified,
    })
}

/// Images of a few horizontal lines of the box, one row per sample.
fn arcs_csv(p: &MapParams, mu: f64, gamma: f64, lines: usize, points: usize) -> Result<String, CliError> {
    let n = p.n();
    let mut header = vec!["line".to_string()];
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.extend(["x", "x_image", "y1_image"].map(String::from));
    let mut t = Table::new(&header)?;
    let s = (mu - gamma).max(0.0);
    for (j, y) in horseshoe_lines(n, gamma, lines.max(1)).iter().enumerate() {
        for a in arc_points(p, y, (-s, s), points) {
            let mut r = vec![j.to_string()];
            r.extend(y.iter().map(|v| num(*v)));
            r.extend([num(a.x), num(a.x_image), num(a.y1_image)]);
            t.row(r)?;
        }
    }
    t.finish()
}
