use crate::config::{Format, RunConfig};
use crate::lyapunov::LyapunovEstimate;
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::{HenonError, State};
use serde_json::json;

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.map.params()?;
    let o = &cfg.simulate;
    let n = p.n();
    let y0 = o.y0.clone().unwrap_or_else(|| vec![0.0; n]);
    if y0.len() != n {
        return Err(HenonError::DimensionMismatch {
            expected: n,
            found: y0.len(),
        }
        .into());
    }
    let domain = super::analytic_domain(&p).ok().flatten();

    let mut state = State::new(o.x0, y0);
    let mut lle = LyapunovEstimate::new(n + 1);
    let mut escaped_at = None;
    for step in 1..=o.transient {
        state.x = p.step_in_place(state.x, &mut state.y);
        if state.is_escaped() {
            escaped_at = Some(step);
            break;
        }
    }

    let mut rows: Vec<(State, f64)> = Vec::with_capacity(if escaped_at.is_none() { o.points } else { 0 });
    let mut all_inside = true;
    if escaped_at.is_none() {
        for k in 1..=o.points {
            let x_prev = state.x;
            state.x = p.step_in_place(state.x, &mut state.y);
            if state.is_escaped() {
                escaped_at = Some(o.transient + k);
                break;
            }
            let est = if o.lle { lle.advance(&p, x_prev) } else { f64::NAN };
            if let Some(d) = &domain {
                all_inside &= d.contains(&state);
            }
            rows.push((state.clone(), est));
        }
    }

    let body = match cfg.format {
        Format::Csv => {
            let mut header = vec!["x".to_string()];
            header.extend((1..=n).map(|i| format!("y{i}")));
            if o.lle {
                header.push("lle".into());
            }
            let mut t = Table::new(&header)?;
            for (s, est) in &rows {
                let mut r: Vec<String> = s.to_vec().into_iter().map(num).collect();
                if o.lle {
                    r.push(num(*est));
                }
                t.row(r)?;
            }
            t.finish()?
        }
        Format::Json => {
            let points: Vec<Vec<f64>> = rows.iter().map(|(s, _)| s.to_vec()).collect();
            let lle_col: Option<Vec<f64>> = o.lle.then(|| rows.iter().map(|(_, e)| *e).collect());
            pretty(&json!({ "map": p, "points": points, "lle": lle_col }))?
        }
    };

    let inside = domain.as_ref().map(|_| all_inside && escaped_at.is_none());
    let summary = json!({
        "command": "simulate",
        "points": rows.len(),
        "escaped_at_step": escaped_at,
        "domain": domain,
        "all_points_inside_domain": inside,
        "lle": o.lle.then(|| lle.estimate()),
    });
    Ok(Outcome {
        body,
        summary,
        passed: escaped_at.is_none() && inside != Some(false),
    })
}
