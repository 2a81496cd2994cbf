pub mod certify;
pub mod continuation;
pub mod horseshoe;
pub mod simulate;
pub mod spectrum;
pub mod sweep;

use henon_core::trapping::{theorem2_domain, theorem3_domain, TrappingDomain};
use henon_core::{MapParams, Nonlinearity, Result};

/// The analytic trapping domain for the map's family, if its certificate
/// holds. General polynomials have no closed-form certificate.
pub fn analytic_domain(p: &MapParams) -> Result<Option<TrappingDomain>> {
    match *p.f() {
        Nonlinearity::Quadratic { mu } => theorem2_domain(mu, p.b(), p.a_bound()),
        Nonlinearity::Cubic { mu } => theorem3_domain(mu, p.b(), p.a_bound()),
        Nonlinearity::Polynomial { .. } => Ok(None),
    }
}
