//! Trapping domains and attractor certificates.
//!
//! A domain `D_alpha = (alpha-, alpha+) x {||y||_1 < gamma}` is certified
//! analytically here; [`oracle`] checks the same claims by sampling and
//! brute-force iteration.

mod oracle;

pub use oracle::{
    brute_force_trap_oracle, lemma1_check, lemma1_check_points, oracle_seeds, sample_domain,
    sandwich_check, sandwich_check_points, OracleFailure, OracleReport, SampleReport,
};

use crate::error::{HenonError, Result};
use crate::map::{MapParams, Nonlinearity, State};
use serde::{Deserialize, Serialize};

/// Default slack for analytic certificate comparisons.
pub const EPS_CERT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    Theorem2,
    Theorem3,
    Theorem1General,
    OracleOnly,
}

/// Box `(alpha_minus, alpha_plus) x {||y||_1 < gamma}`.
///
/// With `gamma = 0` (no coupling) the y-part is read as the single point
/// `y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappingDomain {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub gamma: f64,
    pub certified_by: Certification,
}

impl TrappingDomain {
    pub fn new(alpha_minus: f64, alpha_plus: f64, gamma: f64, certified_by: Certification) -> Result<Self> {
        if !(alpha_minus < alpha_plus) {
            return Err(HenonError::BadInterval {
                lo: alpha_minus,
                hi: alpha_plus,
            });
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(HenonError::InvalidParameter {
                name: "gamma",
                value: gamma,
                constraint: "gamma >= 0",
            });
        }
        Ok(TrappingDomain {
            alpha_minus,
            alpha_plus,
            gamma,
            certified_by,
        })
    }

    pub fn symmetric(alpha: f64, gamma: f64, certified_by: Certification) -> Result<Self> {
        TrappingDomain::new(-alpha, alpha, gamma, certified_by)
    }

    /// `max(|alpha-|, |alpha+|)`
    pub fn alpha(&self) -> f64 {
        self.alpha_minus.abs().max(self.alpha_plus.abs())
    }

    pub fn contains_x(&self, x: f64) -> bool {
        x > self.alpha_minus && x < self.alpha_plus
    }

    pub fn contains_y_norm(&self, norm: f64) -> bool {
        in_dy(norm, self.gamma)
    }

    pub fn contains(&self, s: &State) -> bool {
        self.contains_x(s.x) && self.contains_y_norm(s.y_norm())
    }

    pub fn is_certified(&self) -> bool {
        self.certified_by != Certification::OracleOnly
    }
}

#[inline]
pub(crate) fn in_dy(norm: f64, gamma: f64) -> bool {
    norm < gamma || (gamma == 0.0 && norm == 0.0)
}

/// The pair of one-dimensional maps `f(x) + gamma` and `f(x) - gamma` that
/// bracket the x-dynamics inside a trapping box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxMaps {
    pub f: Nonlinearity,
    pub gamma: f64,
}

impl AuxMaps {
    pub fn new(f: Nonlinearity, gamma: f64) -> Self {
        AuxMaps { f, gamma }
    }

    pub fn plus(&self, x: f64) -> f64 {
        self.f.eval(x) + self.gamma
    }

    pub fn minus(&self, x: f64) -> f64 {
        self.f.eval(x) - self.gamma
    }
}

/// Bounds on `x'` from the actual y-norm: `f(x) -+ ||y||_1`.
pub fn corollary1_bounds(f: &Nonlinearity, s: &State) -> (f64, f64) {
    let fx = f.eval(s.x);
    let r = s.y_norm();
    (fx - r, fx + r)
}

/// Radius of the y-ball for a box of half-width `alpha`:
/// `alpha |b| / (1 - a_bound)`.
pub fn gamma_bound(p: &MapParams, alpha: f64) -> f64 {
    alpha * p.b().abs() / (1.0 - p.a_bound())
}

/// Exact extrema of a polynomial `f` on a closed interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeValues {
    pub x_inf: f64,
    pub x_sup: f64,
    pub argmin: f64,
    pub argmax: f64,
    pub interval: (f64, f64),
}

/// Extrema over `[lo, hi]` from the endpoints and the real roots of `f'`.
pub fn extreme_values(f: &Nonlinearity, interval: (f64, f64)) -> Result<ExtremeValues> {
    let (lo, hi) = interval;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(HenonError::BadInterval { lo, hi });
    }
    let mut candidates = vec![lo, hi];
    candidates.extend(f.to_polynomial().derivative().real_roots_in(lo, hi));

    let mut ev = ExtremeValues {
        x_inf: f64::INFINITY,
        x_sup: f64::NEG_INFINITY,
        argmin: lo,
        argmax: lo,
        interval,
    };
    for x in candidates {
        let v = f.eval(x);
        if v < ev.x_inf {
            ev.x_inf = v;
            ev.argmin = x;
        }
        if v > ev.x_sup {
            ev.x_sup = v;
            ev.argmax = x;
        }
    }
    Ok(ev)
}

/// General attractor condition: `alpha- + gamma <= f(x) <= alpha+ - gamma`
/// on the whole interval.
pub fn theorem1_certify(f: &Nonlinearity, alpha_minus: f64, alpha_plus: f64, gamma: f64) -> bool {
    theorem1_certify_eps(f, alpha_minus, alpha_plus, gamma, EPS_CERT)
}

pub fn theorem1_certify_eps(f: &Nonlinearity, alpha_minus: f64, alpha_plus: f64, gamma: f64, eps: f64) -> bool {
    if !(alpha_minus < alpha_plus) || !(gamma >= 0.0) {
        return false;
    }
    match extreme_values(f, (alpha_minus, alpha_plus)) {
        Ok(ev) => alpha_minus + gamma <= ev.x_inf + eps && ev.x_sup <= alpha_plus - gamma + eps,
        Err(_) => false,
    }
}

/// Certifies `D_alpha` with `alpha± = alpha0±` from an invariant interval of
/// `f` when the extreme values clear the interval ends by more than `gamma`.
pub fn lemma2_certify(f: &Nonlinearity, invariant_interval: (f64, f64), gamma: f64) -> Result<Option<TrappingDomain>> {
    lemma2_certify_eps(f, invariant_interval, gamma, EPS_CERT)
}

pub fn lemma2_certify_eps(
    f: &Nonlinearity,
    invariant_interval: (f64, f64),
    gamma: f64,
    eps: f64,
) -> Result<Option<TrappingDomain>> {
    let (lo, hi) = invariant_interval;
    let ev = extreme_values(f, invariant_interval)?;
    if ev.x_inf < lo - eps || ev.x_sup > hi + eps {
        return Err(HenonError::IntervalNotInvariant {
            lo,
            hi,
            image_lo: ev.x_inf,
            image_hi: ev.x_sup,
        });
    }
    let inner = ev.x_inf - gamma > lo - eps && ev.x_sup + gamma < hi + eps;
    if inner {
        Ok(Some(TrappingDomain::new(lo, hi, gamma, Certification::Theorem1General)?))
    } else {
        Ok(None)
    }
}

fn validate_coupling(b: f64, a_bound: f64) -> Result<()> {
    if !(b.abs() < 1.0) {
        return Err(HenonError::InvalidParameter {
            name: "b",
            value: b,
            constraint: "|b| < 1",
        });
    }
    if !(0.0..1.0).contains(&a_bound) {
        return Err(HenonError::InvalidParameter {
            name: "a_bound",
            value: a_bound,
            constraint: "0 <= a_bound < 1",
        });
    }
    let margin = 1.0 - a_bound - b.abs();
    if margin <= 0.0 {
        return Err(HenonError::CouplingTooStrong { margin });
    }
    Ok(())
}

/// Every quantity in the quadratic certificate, including the intermediate
/// values the derivation passes through.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticCertificate {
    pub mu: f64,
    pub b: f64,
    pub a_bound: f64,
    /// `2 (1 - |b|/(1 - a_bound))^2`
    pub mu_bound: f64,
    /// `mu (1 - a_bound) / (1 - a_bound - |b|)`, also `mu + gamma`.
    pub alpha: f64,
    /// `mu |b| / (1 - a_bound - |b|)`
    pub gamma: f64,
    /// Left end `g-(alpha+)` of the auxiliary invariant interval.
    pub aux_alpha_minus: f64,
    /// `(mu + gamma)^2 - 2 mu`, negative when the extended interval is invariant.
    pub extended_condition: f64,
    /// Fixed points `(x_l, x_r)` of `g-`, when real.
    pub aux_fixed_points: Option<(f64, f64)>,
    pub holds: bool,
}

pub fn theorem2_certificate(mu: f64, b: f64, a_bound: f64) -> Result<QuadraticCertificate> {
    theorem2_certificate_eps(mu, b, a_bound, EPS_CERT)
}

pub fn theorem2_certificate_eps(mu: f64, b: f64, a_bound: f64, eps: f64) -> Result<QuadraticCertificate> {
    validate_coupling(b, a_bound)?;
    let denom = 1.0 - a_bound - b.abs();
    let ratio = 1.0 - b.abs() / (1.0 - a_bound);
    let mu_bound = 2.0 * ratio * ratio;
    let alpha = mu * (1.0 - a_bound) / denom;
    let gamma = mu * b.abs() / denom;
    let aux_alpha_minus = mu - gamma - (mu + gamma) * (mu + gamma);
    let extended_condition = (mu + gamma) * (mu + gamma) - 2.0 * mu;
    let holds = mu > 0.0 && mu < mu_bound + eps && extended_condition < eps;
    Ok(QuadraticCertificate {
        mu,
        b,
        a_bound,
        mu_bound,
        alpha,
        gamma,
        aux_alpha_minus,
        extended_condition,
        aux_fixed_points: quadratic_aux_fixed_points(mu, gamma).ok(),
        holds,
    })
}

/// Symmetric trapping box `|x| < alpha`, `||y||_1 < gamma` for
/// `f = mu - x^2` when `0 < mu < 2 (1 - |b|/(1 - a_bound))^2`.
pub fn theorem2_domain(mu: f64, b: f64, a_bound: f64) -> Result<Option<TrappingDomain>> {
    let c = theorem2_certificate(mu, b, a_bound)?;
    if c.holds {
        Ok(Some(TrappingDomain::symmetric(c.alpha, c.gamma, Certification::Theorem2)?))
    } else {
        Ok(None)
    }
}

/// Fixed points `(x_l, x_r)` of `g-(x) = mu - x^2 - gamma`.
pub fn quadratic_aux_fixed_points(mu: f64, gamma: f64) -> Result<(f64, f64)> {
    let discriminant = 1.0 + 4.0 * (mu - gamma);
    if discriminant < 0.0 {
        return Err(HenonError::NoRealFixedPoints { discriminant });
    }
    let r = discriminant.sqrt();
    Ok(((-1.0 - r) / 2.0, (-1.0 + r) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxBranch {
    Plus,
    Minus,
}

/// Real fixed points of `x^3 - mu x +- gamma`, ascending.
pub fn cubic_aux_fixed_points(mu: f64, gamma: f64, branch: AuxBranch) -> Vec<f64> {
    let shift = match branch {
        AuxBranch::Plus => gamma,
        AuxBranch::Minus => -gamma,
    };
    // x^3 - (mu + 1) x + shift = 0; all real roots lie within the Cauchy bound.
    let poly = crate::poly::Polynomial::new(vec![shift, -(mu + 1.0), 0.0, 1.0]);
    let r = 1.0 + (mu + 1.0).abs().max(shift.abs());
    poly.real_roots_in(-r, r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicCertificate {
    pub mu: f64,
    pub b: f64,
    pub a_bound: f64,
    /// `(1 - a_bound)(3 - mu)/3`
    pub b_bound: f64,
    /// `sqrt(mu/3)`, location of the extrema of `f`.
    pub xi: f64,
    /// `|b| / (1 - a_bound - |b|)`
    pub beta: f64,
    /// `mu (1 + beta)`
    pub p: f64,
    /// `(p - 3)(p + 1.5)^2`, negative exactly when `p < 3`.
    pub p_factored: f64,
    /// `(2 xi mu / 3)(1 + beta)`
    pub alpha: f64,
    /// `(2 xi mu / 3) beta`
    pub gamma: f64,
    pub holds: bool,
}

pub fn theorem3_certificate(mu: f64, b: f64, a_bound: f64) -> Result<CubicCertificate> {
    theorem3_certificate_eps(mu, b, a_bound, EPS_CERT)
}

pub fn theorem3_certificate_eps(mu: f64, b: f64, a_bound: f64, eps: f64) -> Result<CubicCertificate> {
    validate_coupling(b, a_bound)?;
    let xi = (mu.max(0.0) / 3.0).sqrt();
    let beta = b.abs() / (1.0 - a_bound - b.abs());
    let p = mu * (1.0 + beta);
    let p_factored = (p - 3.0) * (p + 1.5) * (p + 1.5);
    let peak = 2.0 * xi * mu / 3.0;
    let b_bound = (1.0 - a_bound) * (3.0 - mu) / 3.0;
    let holds = mu > 0.0 && mu < 3.0 && b.abs() < b_bound + eps && p_factored < eps;
    Ok(CubicCertificate {
        mu,
        b,
        a_bound,
        b_bound,
        xi,
        beta,
        p,
        p_factored,
        alpha: peak * (1.0 + beta),
        gamma: peak * beta,
        holds,
    })
}

/// Symmetric trapping box for `f = x^3 - mu x` when `0 < mu < 3` and
/// `|b| < (1 - a_bound)(3 - mu)/3`.
pub fn theorem3_domain(mu: f64, b: f64, a_bound: f64) -> Result<Option<TrappingDomain>> {
    let c = theorem3_certificate(mu, b, a_bound)?;
    if c.holds {
        Ok(Some(TrappingDomain::symmetric(c.alpha, c.gamma, Certification::Theorem3)?))
    } else {
        Ok(None)
    }
}

/// `(alpha, gamma) = (2 sqrt(mu/3), 2 (1 - mu/3) sqrt(mu/3))`, the cubic box
/// at the largest admissible `|b|`.
pub fn theorem3_boundary_domain(mu: f64) -> (f64, f64) {
    let xi = (mu / 3.0).sqrt();
    (2.0 * xi, 2.0 * (1.0 - mu / 3.0) * xi)
}

/// `|b|` at which the cubic auxiliary maps lose their outer fixed points.
pub fn cubic_saddle_node_curve(mu: f64, a_bound: f64) -> f64 {
    let up = (1.0 + mu).powf(1.5);
    (1.0 - a_bound) * up / (mu.powf(1.5) + up)
}
