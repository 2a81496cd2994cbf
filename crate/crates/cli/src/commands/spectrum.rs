use crate::config::{Format, RunConfig};
use crate::output::{num, pretty, Table};
use crate::{CliError, Outcome};
use henon_core::spectrum::{char_poly_closed_form, char_poly_determinant, eigenvalues, orbit_multipliers};
use serde_json::json;

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.map.params()?;
    let o = &cfg.spectrum;

    let (roots, detail) = match &o.orbit {
        Some(orbit) => {
            let m = orbit_multipliers(&p, orbit)?;
            let detail = json!({
                "period": orbit.len(),
                "m_x": m.m_x,
                "residual": m.residual,
                "multipliers": m.multipliers,
            });
            (m.multipliers, detail)
        }
        None => {
            let fx = p.f().derivative(o.x);
            let closed = char_poly_closed_form(&p, fx);
            let det = char_poly_determinant(&p, fx)?;
            let roots = eigenvalues(&closed);
            let detail = json!({
                "x": o.x,
                "f_prime": fx,
                "closed_form": closed.coeffs,
                "determinant": det.coeffs,
                "roots": roots,
            });
            (roots, detail)
        }
    };

    let body = match cfg.format {
        Format::Json => pretty(&json!({ "map": p, "spectrum": detail }))?,
        Format::Csv => {
            let mut t = Table::new(&["index", "re", "im", "modulus"])?;
            for (i, z) in roots.iter().enumerate() {
                t.row([i.to_string(), num(z.re), num(z.im), num(z.norm())])?;
            }
            t.finish()?
        }
    };
    let spectral_radius = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(Outcome {
        body,
        summary: json!({ "command": "spectrum", "roots": roots.len(), "spectral_radius": spectral_radius }),
        passed: true,
    })
}
