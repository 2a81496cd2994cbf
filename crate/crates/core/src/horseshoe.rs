//! Topological horseshoe for the quadratic map, checked at the level of the
//! covering relation: every horizontal line of the box is mapped to an arc
//! whose monotone branches each stretch across the whole box.

use crate::error::{HenonError, Result};
use crate::map::{MapParams, Nonlinearity};
use crate::poly::bisect;
use crate::trapping::in_dy;
use rayon::prelude::*;
use serde::Serialize;

/// `sqrt(2 (mu + gamma)) < mu - gamma`
pub fn horseshoe_condition(mu: f64, gamma: f64) -> Result<bool> {
    check_inputs(mu, gamma)?;
    Ok((2.0 * (mu + gamma)).sqrt() < mu - gamma)
}

fn check_inputs(mu: f64, gamma: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(HenonError::InvalidParameter {
            name: "mu",
            value: mu,
            constraint: "mu > 0",
        });
    }
    if !(gamma >= 0.0) {
        return Err(HenonError::InvalidParameter {
            name: "gamma",
            value: gamma,
            constraint: "gamma >= 0",
        });
    }
    if mu - gamma <= 0.0 {
        return Err(HenonError::DomainDegenerate { width: mu - gamma });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeIntervals {
    /// `|x| < sqrt(2 gamma)`: some image leaves through the right side.
    pub inner: (f64, f64),
    /// `|x| > sqrt(2 (mu + gamma))`: every image leaves through the left side.
    pub outer_threshold: f64,
}

pub fn escape_intervals(mu: f64, gamma: f64) -> EscapeIntervals {
    let r = (2.0 * gamma).sqrt();
    EscapeIntervals {
        inner: (-r, r),
        outer_threshold: (2.0 * (mu + gamma)).sqrt(),
    }
}

/// y-radius consistent with the box `|x| < mu - gamma`: the fixed point of
/// `gamma = (mu - gamma) |b| / (1 - a_bound)`.
pub fn horseshoe_gamma(mu: f64, b: f64, a_bound: f64) -> f64 {
    mu * b.abs() / (1.0 - a_bound + b.abs())
}

/// Inverse of [`horseshoe_gamma`] in `|b|`.
pub fn horseshoe_coupling(mu: f64, gamma: f64, a_bound: f64) -> f64 {
    gamma * (1.0 - a_bound) / (mu - gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorseshoeReport {
    pub mu: f64,
    pub gamma: f64,
    pub condition_holds: bool,
    pub escape_inner: (f64, f64),
    pub escape_outer_threshold: f64,
    /// x-intervals (one per monotone branch) whose images lie in the box
    /// for every sampled line.
    pub strip_preimages: Vec<(f64, f64)>,
    /// Distance between the two strips; zero when they touch.
    pub strip_gap: Option<f64>,
    pub lines_checked: usize,
    pub covering_verified: bool,
    pub failure: Option<String>,
}

/// One sampled point of the image of a horizontal line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcPoint {
    pub x: f64,
    pub x_image: f64,
    pub y1_image: f64,
}

/// Image of the line `{y = const}` over `x in [lo, hi]`.
pub fn arc_points(p: &MapParams, y: &[f64], x_range: (f64, f64), count: usize) -> Vec<ArcPoint> {
    let c: f64 = y.iter().sum();
    let (lo, hi) = x_range;
    (0..count)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / (count.max(2) - 1) as f64;
            ArcPoint {
                x,
                x_image: p.f().eval(x) + c,
                y1_image: p.b() * x,
            }
        })
        .collect()
}

/// Horizontal lines spread through the open l1-ball of radius `gamma`;
/// line `j` sits on coordinate `j mod n` with signed height strictly inside
/// `(-gamma, gamma)`.
pub fn horseshoe_lines(n: usize, gamma: f64, count: usize) -> Vec<Vec<f64>> {
    let rim = gamma * (1.0 - 1e-9);
    (0..count)
        .map(|j| {
            let t = if count == 1 {
                0.0
            } else {
                -1.0 + 2.0 * j as f64 / (count - 1) as f64
            };
            let mut y = vec![0.0; n];
            y[j % n] = t * rim;
            y
        })
        .collect()
}

/// Outcome of the general covering check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    /// Branch boundaries: endpoints of the box plus interior critical points.
    pub knots: Vec<f64>,
    /// For each monotone branch, whether its image covers the box on every line.
    pub branch_covers: Vec<bool>,
    /// Per branch, the intersection over lines of the slab preimage.
    pub strips: Vec<Option<(f64, f64)>>,
    pub lines_checked: usize,
    /// Every sampled interior point has `||y'||_1 < gamma`.
    pub images_in_dy: bool,
    /// Lowest image value at the two box endpoints over all lines.
    pub endpoint_images: (f64, f64),
    /// Highest image value at the two box endpoints over all lines.
    pub endpoint_images_max: (f64, f64),
}

impl CoveringReport {
    pub fn full_crossings(&self) -> usize {
        self.branch_covers.iter().filter(|c| **c).count()
    }
}

struct LineResult {
    covers: Vec<bool>,
    strips: Vec<Option<(f64, f64)>>,
    images_in_dy: bool,
    ends: (f64, f64),
    undersampled: Option<usize>,
}

/// Checks, line by line, which monotone branches of the image arc cross the
/// whole box `[lo, hi]` (image reaching `<= lo` at one end and `>= hi` at the
/// other). Works for any polynomial nonlinearity.
pub fn covering_relation(
    p: &MapParams,
    x_range: (f64, f64),
    gamma: f64,
    line_count: usize,
    points_per_line: usize,
) -> Result<CoveringReport> {
    let (lo, hi) = x_range;
    if !(lo < hi) {
        return Err(HenonError::BadInterval { lo, hi });
    }
    if points_per_line < 3 {
        return Err(HenonError::Undersampled {
            points: points_per_line,
            suggested: 3,
        });
    }
    let f = p.f();
    let mut knots = vec![lo];
    knots.extend(
        f.to_polynomial()
            .derivative()
            .real_roots_in(lo, hi)
            .into_iter()
            .filter(|&c| c > lo && c < hi),
    );
    knots.push(hi);

    let lines = horseshoe_lines(p.n(), gamma, line_count.max(1));
    let results: Vec<LineResult> = lines
        .par_iter()
        .map(|y| check_line(p, f, &knots, (lo, hi), gamma, y, points_per_line))
        .collect();

    if let Some(suggested) = results.iter().filter_map(|r| r.undersampled).max() {
        return Err(HenonError::Undersampled {
            points: points_per_line,
            suggested,
        });
    }

    let branches = knots.len() - 1;
    let mut report = CoveringReport {
        knots,
        branch_covers: vec![true; branches],
        strips: vec![Some((f64::NEG_INFINITY, f64::INFINITY)); branches],
        lines_checked: results.len(),
        images_in_dy: true,
        endpoint_images: (f64::INFINITY, f64::INFINITY),
        endpoint_images_max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
    };
    for r in &results {
        report.images_in_dy &= r.images_in_dy;
        report.endpoint_images.0 = report.endpoint_images.0.min(r.ends.0);
        report.endpoint_images.1 = report.endpoint_images.1.min(r.ends.1);
        report.endpoint_images_max.0 = report.endpoint_images_max.0.max(r.ends.0);
        report.endpoint_images_max.1 = report.endpoint_images_max.1.max(r.ends.1);
        for k in 0..branches {
            report.branch_covers[k] &= r.covers[k];
            report.strips[k] = match (report.strips[k], r.strips[k]) {
                (Some((a, b)), Some((c, d))) => {
                    let (l, h) = (a.max(c), b.min(d));
                    (l <= h).then_some((l, h))
                }
                _ => None,
            };
        }
    }
    Ok(report)
}

fn check_line(
    p: &MapParams,
    f: &Nonlinearity,
    knots: &[f64],
    (lo, hi): (f64, f64),
    gamma: f64,
    y: &[f64],
    points: usize,
) -> LineResult {
    let c: f64 = y.iter().sum();
    let image = |x: f64| f.eval(x) + c;
    let tail: f64 = y
        .iter()
        .take(y.len().saturating_sub(1))
        .zip(p.a())
        .map(|(yi, ai)| (ai * yi).abs())
        .sum();

    let xs: Vec<f64> = (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect();
    // the box is open in x, so the closed endpoints are not tested
    let images_in_dy = xs[1..points - 1]
        .iter()
        .all(|&x| in_dy((p.b() * x).abs() + tail, gamma));

    let branches = knots.len() - 1;
    let mut covers = vec![false; branches];
    let mut strips = vec![None; branches];
    let mut undersampled = None;
    for k in 0..branches {
        let (u, v) = (knots[k], knots[k + 1]);
        let (eu, ev) = (image(u), image(v));
        let (bottom, top) = (eu.min(ev), eu.max(ev));
        if !(bottom <= lo && top >= hi) {
            continue;
        }
        covers[k] = true;
        let cross = |level: f64| -> f64 {
            let g = |x: f64| image(x) - level;
            let gu = g(u);
            if gu == 0.0 {
                u
            } else if g(v) == 0.0 {
                v
            } else {
                bisect(g, u, v, gu)
            }
        };
        let (a, b) = (cross(lo), cross(hi));
        let (s_lo, s_hi) = (a.min(b), a.max(b));
        strips[k] = Some((s_lo, s_hi));

        let sampled_inside = xs
            .iter()
            .any(|&x| x >= u && x <= v && image(x) > lo && image(x) < hi);
        if !sampled_inside {
            let width = (s_hi - s_lo).max(f64::MIN_POSITIVE);
            let need = ((hi - lo) / (0.5 * width)).ceil() as usize + 1;
            undersampled = Some(undersampled.map_or(need, |u: usize| u.max(need)));
        }
    }
    LineResult {
        covers,
        strips,
        images_in_dy,
        ends: (image(lo), image(hi)),
        undersampled,
    }
}

/// Horseshoe check for `f = mu - x^2` with the y-radius implied by `b`
/// (see [`horseshoe_gamma`]).
pub fn verify_covering(p: &MapParams, line_count: usize, points_per_line: usize) -> Result<HorseshoeReport> {
    let mu = match *p.f() {
        Nonlinearity::Quadratic { mu } => mu,
        _ => return Err(HenonError::NotQuadratic),
    };
    let gamma = horseshoe_gamma(mu, p.b(), p.a_bound());
    verify_covering_with_gamma(p, gamma, line_count, points_per_line)
}

/// Horseshoe check on the box `|x| < mu - gamma`, `||y||_1 < gamma`.
///
/// Requires (i) both arc endpoints strictly left of the box, (ii) the apex
/// at or beyond the right side, and (iii) exactly two monotone branches
/// crossing the box, on every sampled line.
pub fn verify_covering_with_gamma(
    p: &MapParams,
    gamma: f64,
    line_count: usize,
    points_per_line: usize,
) -> Result<HorseshoeReport> {
    let mu = match *p.f() {
        Nonlinearity::Quadratic { mu } => mu,
        _ => return Err(HenonError::NotQuadratic),
    };
    let condition_holds = horseshoe_condition(mu, gamma)?;
    let esc = escape_intervals(mu, gamma);
    let mut report = HorseshoeReport {
        mu,
        gamma,
        condition_holds,
        escape_inner: esc.inner,
        escape_outer_threshold: esc.outer_threshold,
        strip_preimages: Vec::new(),
        strip_gap: None,
        lines_checked: 0,
        covering_verified: false,
        failure: None,
    };
    if !condition_holds {
        report.failure = Some("horseshoe condition does not hold".into());
        return Ok(report);
    }

    let s = mu - gamma;
    let cov = covering_relation(p, (-s, s), gamma, line_count, points_per_line)?;
    report.lines_checked = cov.lines_checked;

    let ends_left = cov.endpoint_images_max.0 < -s && cov.endpoint_images_max.1 < -s;
    let failure = if !ends_left {
        Some("arc endpoint not left of the box".to_string())
    } else if cov.branch_covers.len() != 2 || cov.full_crossings() != 2 {
        Some(format!("{} full crossings, expected 2", cov.full_crossings()))
    } else if !cov.images_in_dy {
        Some("arc image leaves D_y".to_string())
    } else {
        None
    };

    report.strip_preimages = cov.strips.iter().flatten().copied().collect();
    if report.strip_preimages.len() == 2 {
        report.strip_gap = Some(report.strip_preimages[1].0 - report.strip_preimages[0].1);
    }
    report.covering_verified = failure.is_none() && report.strip_preimages.len() == 2;
    report.failure = failure.or_else(|| {
        (!report.covering_verified).then(|| "strip preimages empty".to_string())
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn henon(mu: f64, b: f64) -> MapParams {
        MapParams::planar(Nonlinearity::Quadratic { mu }, b).unwrap()
    }

    #[test]
    fn condition_examples() {
        assert!(horseshoe_condition(2.5, 0.0).unwrap());
        assert!(!horseshoe_condition(1.9, 0.0).unwrap());
        assert!(horseshoe_condition(3.0, 0.1).unwrap());
        assert!(!horseshoe_condition(2.0, 0.5).unwrap());
        assert!(matches!(
            horseshoe_condition(1.0, 1.0),
            Err(HenonError::DomainDegenerate { .. })
        ));
    }

    #[test]
    fn condition_is_strict_at_equality() {
        assert!(!horseshoe_condition(2.0, 0.0).unwrap());
        // sqrt(2(mu + g)) = mu - g solved in mu for g = 0.1
        let g = 0.1;
        let h = |mu: f64| (2.0 * (mu + g)).sqrt() - (mu - g);
        let mu_star = bisect(h, 1.0, 5.0, h(1.0));
        assert!(h(mu_star).abs() < 1e-12);
        assert!(!horseshoe_condition(mu_star - 1e-9, g).unwrap());
        assert!(horseshoe_condition(mu_star + 1e-9, g).unwrap());
    }

    #[test]
    fn escape_interval_examples() {
        let e = escape_intervals(2.7, 0.0);
        assert_eq!(e.inner, (0.0, 0.0));
        let e = escape_intervals(3.0, 0.1);
        assert_relative_eq!(e.inner.1, 0.2f64.sqrt());
        assert!((e.inner.1 - 0.447).abs() < 1e-3);
        assert!((e.outer_threshold - 2.490).abs() < 1e-3);
        for &(mu, g) in &[(3.0, 0.1), (2.0, 0.5), (2.2, 0.01), (4.0, 0.7)] {
            let e = escape_intervals(mu, g);
            assert_eq!(e.outer_threshold < mu - g, horseshoe_condition(mu, g).unwrap());
        }
    }

    #[test]
    fn gamma_coupling_roundtrip() {
        let g = horseshoe_gamma(3.0, 0.02, 0.0);
        assert_relative_eq!(g, 0.06 / 1.02);
        assert_relative_eq!(horseshoe_coupling(3.0, g, 0.0), 0.02, max_relative = 1e-14);
        // gamma is the Lemma-1 radius for alpha = mu - gamma
        assert_relative_eq!(g, (3.0 - g) * 0.02, max_relative = 1e-14);
    }

    #[test]
    fn uncoupled_parabola_crossings_match_roots() {
        let p = henon(3.0, 0.0);
        let r = verify_covering(&p, 1, 1001).unwrap();
        assert!(r.condition_holds && r.covering_verified, "{r:?}");
        // 3 - x^2 = -3 at x = -+sqrt(6); 3 - x^2 = 3 at x = 0
        let s6 = 6f64.sqrt();
        assert_relative_eq!(r.strip_preimages[0].0, -s6, epsilon = 1e-10);
        assert_relative_eq!(r.strip_preimages[0].1, 0.0, epsilon = 1e-10);
        assert_relative_eq!(r.strip_preimages[1].0, 0.0, epsilon = 1e-10);
        assert_relative_eq!(r.strip_preimages[1].1, s6, epsilon = 1e-10);
        assert_eq!(r.strip_gap, Some(0.0));
    }

    #[test]
    fn small_coupling_verifies_with_gap() {
        for &b in &[0.005, 0.01, 0.02] {
            let p = henon(3.0, b);
            let r = verify_covering(&p, 50, 2000).unwrap();
            assert!(r.gamma < 0.1);
            assert!(r.covering_verified, "{r:?}");
            let gap = r.strip_gap.unwrap();
            assert!(gap > 0.0);
            // strips are separated by the inner escape interval
            assert_relative_eq!(gap, 2.0 * (2.0 * r.gamma * (1.0 - 1e-9)).sqrt(), max_relative = 1e-6);
            let s = 3.0 - r.gamma;
            for (l, h) in &r.strip_preimages {
                assert!(-s <= *l && l < h && *h <= s);
            }
        }
    }

    #[test]
    fn failed_condition_skips_covering() {
        let p = henon(2.0, horseshoe_coupling(2.0, 0.5, 0.0));
        assert_relative_eq!(horseshoe_gamma(2.0, p.b(), 0.0), 0.5, max_relative = 1e-14);
        let r = verify_covering(&p, 10, 100).unwrap();
        assert!(!r.condition_holds);
        assert!(!r.covering_verified);
        assert_eq!(r.lines_checked, 0);
    }

    #[test]
    fn undersampling_is_reported() {
        // the branches cross the slab over a narrow x-range when mu is large
        let big = MapParams::planar(Nonlinearity::Quadratic { mu: 400.0 }, 0.0).unwrap();
        match verify_covering(&big, 1, 4) {
            Err(HenonError::Undersampled { points, suggested }) => {
                assert_eq!(points, 4);
                assert!(suggested > 4);
                assert!(verify_covering(&big, 1, suggested).unwrap().covering_verified);
            }
            other => panic!("expected undersampled, got {other:?}"),
        }
        assert!(verify_covering(&big, 1, 2).is_err());
    }

    #[test]
    fn cubic_has_three_full_crossings() {
        let p = MapParams::planar(Nonlinearity::Cubic { mu: 4.0 }, 0.01).unwrap();
        let gamma = 2.5 * 0.01;
        let cov = covering_relation(&p, (-2.5, 2.5), gamma, 20, 2000).unwrap();
        assert_eq!(cov.full_crossings(), 3);
        assert!(cov.images_in_dy);
        let strips: Vec<_> = cov.strips.iter().flatten().collect();
        assert_eq!(strips.len(), 3);
        assert!(strips.windows(2).all(|w| w[0].1 < w[1].0));
    }

    #[test]
    fn non_quadratic_rejected() {
        let p = MapParams::planar(Nonlinearity::Cubic { mu: 4.0 }, 0.01).unwrap();
        assert_eq!(verify_covering(&p, 1, 10), Err(HenonError::NotQuadratic));
    }

    #[test]
    fn arc_points_follow_image_formula() {
        let p = MapParams::new(Nonlinearity::Quadratic { mu: 3.0 }, 0.02, vec![0.5]).unwrap();
        let pts = arc_points(&p, &[0.01, -0.03], (-2.9, 2.9), 11);
        assert_eq!(pts.len(), 11);
        for a in pts {
            assert_relative_eq!(a.x_image, 3.0 - a.x * a.x - 0.02, epsilon = 1e-14);
            assert_relative_eq!(a.y1_image, 0.02 * a.x);
        }
    }
}
