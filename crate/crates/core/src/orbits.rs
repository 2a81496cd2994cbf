//! Periodic orbits: discovery for the one-dimensional map `f` at `b = 0`,
//! a structural-stability test on the reduced multiplier, and Newton
//! continuation of each stable cycle into `b != 0`.

use crate::error::{HenonError, Result};
use crate::map::{MapParams, Nonlinearity, State};
use crate::poly::bisect;
use crate::spectrum::{orbit_multipliers, sort_by_modulus};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest period searched by [`find_1d_orbits`].
pub const MAX_PERIOD: usize = 12;
/// Margin around `|m_x| = 0` and `|m_x| = 1` (and around the unit circle
/// during continuation).
pub const STABILITY_MARGIN: f64 = 1e-6;
/// Closure residual every accepted orbit must meet.
pub const ORBIT_TOLERANCE: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Smallest b-increment tried before continuation gives up.
pub const MIN_B_STEP: f64 = 1e-6;

/// Grid cells per unit of period used to bracket roots of `f^p(x) - x`.
const CELLS_PER_PERIOD: usize = 10_000;
/// `|f^p(x) - x|` below this at a local minimum without a sign change is a
/// tangent root.
const TANGENT_TOLERANCE: f64 = 1e-10;
/// Two cycles closer than this (max-norm, after rotation) are the same.
const SAME_ORBIT: f64 = 1e-7;

/// A cycle `points[0] -> points[1] -> .. -> points[0]` of the map at
/// coupling `b_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<State>,
    pub b_value: f64,
    /// Eigenvalues of the Jacobian product around the cycle, modulus
    /// descending.
    pub multipliers: Vec<Complex64>,
    /// `prod f'(x_i)`
    pub m_x: f64,
    /// Largest `|T(s_i) - s_{i+1}|` around the cycle.
    pub residual: f64,
    /// Found as a double root of `f^p(x) - x` (no sign change).
    pub tangent: bool,
}

impl PeriodicOrbit {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|s| s.x).collect()
    }

    pub fn multiplier_moduli(&self) -> Vec<f64> {
        self.multipliers.iter().map(|m| m.norm()).collect()
    }
}

/// Interval that contains every bounded orbit of `f`, padded by 1% so that
/// orbits on its boundary are still bracketed.
pub fn default_interval(f: &Nonlinearity) -> (f64, f64) {
    let r = match f {
        Nonlinearity::Quadratic { mu } => (1.0 + (1.0 + 4.0 * mu).max(0.0).sqrt()) / 2.0,
        Nonlinearity::Cubic { mu } => (1.0 + mu).max(1.0).sqrt(),
        Nonlinearity::Polynomial { .. } => {
            let p = f.to_polynomial();
            let lead = p.leading().abs();
            match p.degree() {
                Some(d) if d >= 2 => {
                    let c = p.coeffs();
                    let s: f64 = c[..d].iter().map(|v| v.abs()).sum::<f64>() + 1.0;
                    1.0 + s / lead
                }
                _ => 1.0,
            }
        }
    };
    let r = r * 1.01;
    (-r, r)
}

fn iterate_1d(f: &Nonlinearity, x: f64, k: usize) -> f64 {
    (0..k).fold(x, |v, _| f.eval(v))
}

/// Roots of `f^p(x) - x` on `[lo, hi]`: sign changes on a uniform grid,
/// refined by bisection, plus tangent roots found by golden-section search
/// on `|f^p(x) - x|` at grid-level local minima.
fn roots_of_period(f: &Nonlinearity, period: usize, lo: f64, hi: f64) -> Vec<(f64, bool)> {
    let g = |x: f64| iterate_1d(f, x, period) - x;
    let cells = CELLS_PER_PERIOD * period;
    let xs: Vec<f64> = (0..=cells)
        .map(|k| if k == cells { hi } else { lo + (hi - lo) * k as f64 / cells as f64 })
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();

    let mut roots = Vec::new();
    for k in 0..=cells {
        if gs[k] == 0.0 {
            roots.push((xs[k], false));
        }
        if k < cells && gs[k] * gs[k + 1] < 0.0 {
            roots.push((bisect(g, xs[k], xs[k + 1], gs[k]), false));
        }
        // grid-level local minimum of |g| (one-sided at the interval ends)
        let (kl, kr) = (k.saturating_sub(1), (k + 1).min(cells));
        let (l, m, r) = (gs[kl], gs[k], gs[kr]);
        let same_sign = (l > 0.0 && m > 0.0 && r > 0.0) || (l < 0.0 && m < 0.0 && r < 0.0);
        if same_sign && m.abs() <= l.abs() && m.abs() <= r.abs() {
            {
                let x = golden_min(|x| g(x).abs(), xs[kl], xs[kr]);
                if g(x).abs() < TANGENT_TOLERANCE {
                    roots.push((x, true));
                }
            }
        }
    }
    roots
}

fn golden_min<F: Fn(f64) -> f64>(h: F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if hc <= hd {
            b = d;
            d = c;
            hd = hc;
            c = b - r * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + r * (b - a);
            hd = h(d);
        }
    }
    if hc <= hd {
        c
    } else {
        d
    }
}

fn divisors_below(p: usize) -> impl Iterator<Item = usize> {
    (1..p).filter(move |d| p % d == 0)
}

/// Rotation of the cycle that starts at its smallest `x`.
fn canonical(xs: &[f64]) -> Vec<f64> {
    let start = xs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    xs[start..].iter().chain(&xs[..start]).copied().collect()
}

fn orbit_at_zero(f: &Nonlinearity, xs: Vec<f64>, n: usize, tangent: bool) -> PeriodicOrbit {
    let period = xs.len();
    let m_x: f64 = xs.iter().map(|&x| f.derivative(x)).product();
    let residual = (0..period)
        .map(|i| (f.eval(xs[i]) - xs[(i + 1) % period]).abs())
        .fold(0.0, f64::max);
    let mut multipliers = vec![Complex64::new(0.0, 0.0); n + 1];
    multipliers[0] = Complex64::new(m_x, 0.0);
    sort_by_modulus(&mut multipliers);
    PeriodicOrbit {
        period,
        points: xs.into_iter().map(|x| State::on_axis(x, n)).collect(),
        b_value: 0.0,
        multipliers,
        m_x,
        residual,
        tangent,
    }
}

/// All cycles of the one-dimensional map `f` with period `1..=period_max`
/// whose points lie in `interval`, embedded at `b = 0` with `y = 0` in `n`
/// y-dimensions. Each cycle appears once, rotated to start at its smallest
/// point, and only at its minimal period. Results are ordered by period,
/// then by starting point.
pub fn find_1d_orbits(
    f: &Nonlinearity,
    period_max: usize,
    interval: (f64, f64),
    n: usize,
) -> Result<Vec<PeriodicOrbit>> {
    f.validate()?;
    if period_max == 0 || period_max > MAX_PERIOD {
        return Err(HenonError::InvalidParameter {
            name: "period_max",
            value: period_max as f64,
            constraint: "1 <= period_max <= 12",
        });
    }
    if n == 0 {
        return Err(HenonError::InvalidParameter {
            name: "n",
            value: 0.0,
            constraint: "n >= 1",
        });
    }
    let (lo, hi) = interval;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(HenonError::BadInterval { lo, hi });
    }
    let planar = MapParams::planar(f.clone(), 0.0)?;

    let per_period: Vec<Vec<PeriodicOrbit>> = (1..=period_max)
        .into_par_iter()
        .map(|period| {
            let mut found: Vec<PeriodicOrbit> = Vec::new();
            for (x0, tangent) in roots_of_period(f, period, lo, hi) {
                let mut xs: Vec<f64> = Vec::with_capacity(period);
                let mut x = x0;
                for _ in 0..period {
                    xs.push(x);
                    x = f.eval(x);
                }
                if !tangent {
                    let seed: Vec<State> = xs.iter().map(|&x| State::on_axis(x, 1)).collect();
                    if let Ok((pts, _)) = newton_cycle(&planar, &seed) {
                        xs = pts.iter().map(|s| s.x).collect();
                    }
                }
                let minimal = divisors_below(period).all(|d| (xs[d] - xs[0]).abs() > SAME_ORBIT);
                if !minimal || xs.iter().any(|v| !v.is_finite()) {
                    continue;
                }
                let xs = canonical(&xs);
                let dup = found.iter().any(|o| {
                    o.points
                        .iter()
                        .zip(&xs)
                        .all(|(s, x)| (s.x - x).abs() < SAME_ORBIT)
                });
                if !dup {
                    found.push(orbit_at_zero(f, xs, n, tangent));
                }
            }
            found.retain(|o| o.residual < ORBIT_TOLERANCE);
            found.sort_by(|a, b| a.points[0].x.total_cmp(&b.points[0].x));
            found
        })
        .collect();
    Ok(per_period.into_iter().flatten().collect())
}

/// `m_x` bounded away from 0 and from the unit circle by
/// [`STABILITY_MARGIN`], and not a tangent root.
pub fn structural_stability(o: &PeriodicOrbit) -> bool {
    let m = o.m_x.abs();
    !o.tangent && m > STABILITY_MARGIN && (m - 1.0).abs() > STABILITY_MARGIN
}

/// Solves the stacked cycle system `T(s_i) - s_{i+1 mod p} = 0` by Newton's
/// method from `seed`, returning the cycle and its residual.
pub fn newton_cycle(p: &MapParams, seed: &[State]) -> Result<(Vec<State>, f64)> {
    let period = seed.len();
    let dim = p.n() + 1;
    if period == 0 {
        return Err(HenonError::InvalidParameter {
            name: "period",
            value: 0.0,
            constraint: "period >= 1",
        });
    }
    if let Some(s) = seed.iter().find(|s| s.y.len() != p.n()) {
        return Err(HenonError::DimensionMismatch {
            expected: p.n(),
            found: s.y.len(),
        });
    }
    let size = period * dim;
    let mut z = DVector::<f64>::zeros(size);
    for (i, s) in seed.iter().enumerate() {
        z[i * dim] = s.x;
        for (k, &v) in s.y.iter().enumerate() {
            z[i * dim + 1 + k] = v;
        }
    }

    let residual_of = |z: &DVector<f64>| -> DVector<f64> {
        let mut g = DVector::<f64>::zeros(size);
        let mut y = vec![0.0; dim - 1];
        for i in 0..period {
            let base = i * dim;
            let next = ((i + 1) % period) * dim;
            y.copy_from_slice(&z.as_slice()[base + 1..base + dim]);
            let x = p.step_in_place(z[base], &mut y);
            g[base] = x - z[next];
            for k in 0..dim - 1 {
                g[base + 1 + k] = y[k] - z[next + 1 + k];
            }
        }
        g
    };

    let mut g = residual_of(&z);
    let mut norm = g.amax();
    let mut iterations = 0;
    while !(norm < ORBIT_TOLERANCE) {
        if iterations == MAX_NEWTON_ITERATIONS || !norm.is_finite() {
            return Err(HenonError::NewtonDivergence {
                b: p.b(),
                iterations,
                residual: norm,
            });
        }
        let mut jac = DMatrix::<f64>::zeros(size, size);
        for i in 0..period {
            let base = i * dim;
            let next = ((i + 1) % period) * dim;
            let ji = p.jacobian_at(z[base]);
            jac.view_mut((base, base), (dim, dim)).copy_from(&ji);
            for k in 0..dim {
                jac[(base + k, next + k)] -= 1.0;
            }
        }
        let step = match jac.lu().solve(&(-&g)) {
            Some(s) => s,
            None => {
                return Err(HenonError::NewtonDivergence {
                    b: p.b(),
                    iterations,
                    residual: norm,
                })
            }
        };
        z += step;
        g = residual_of(&z);
        norm = g.amax();
        iterations += 1;
    }

    let points = (0..period)
        .map(|i| State::new(z[i * dim], z.as_slice()[i * dim + 1..(i + 1) * dim].to_vec()))
        .collect();
    Ok((points, norm))
}

/// Continuation that stopped early, with every orbit accepted before the
/// failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct ContinuationFailure {
    #[source]
    pub error: HenonError,
    pub partial: Vec<PeriodicOrbit>,
}

impl From<HenonError> for ContinuationFailure {
    fn from(error: HenonError) -> Self {
        ContinuationFailure {
            error,
            partial: Vec::new(),
        }
    }
}

/// Follows a structurally stable `b = 0` cycle to `b = b_target` in `steps`
/// equal increments, each solved by Newton's method from the previous
/// solution. A failed increment is retried at half the size down to
/// [`MIN_B_STEP`]. The returned history starts with `o` itself.
pub fn continue_in_b(
    p0: &MapParams,
    o: &PeriodicOrbit,
    b_target: f64,
    steps: usize,
) -> std::result::Result<Vec<PeriodicOrbit>, ContinuationFailure> {
    if p0.b() != 0.0 || o.b_value != 0.0 {
        return Err(HenonError::InvalidParameter {
            name: "b",
            value: if p0.b() != 0.0 { p0.b() } else { o.b_value },
            constraint: "continuation starts at b == 0",
        }
        .into());
    }
    if !(b_target.abs() < 1.0) {
        return Err(HenonError::InvalidParameter {
            name: "b_target",
            value: b_target,
            constraint: "|b| < 1",
        }
        .into());
    }
    if b_target == 0.0 {
        return Ok(vec![o.clone()]);
    }
    if !structural_stability(o) {
        return Err(HenonError::NotStructurallyStable { m_x: o.m_x }.into());
    }
    if steps == 0 {
        return Err(HenonError::InvalidParameter {
            name: "steps",
            value: 0.0,
            constraint: "steps >= 1",
        }
        .into());
    }
    if let Some(s) = o.points.iter().find(|s| s.y.len() != p0.n()) {
        return Err(HenonError::DimensionMismatch {
            expected: p0.n(),
            found: s.y.len(),
        }
        .into());
    }

    let mut history = vec![o.clone()];
    let mut current = o.points.clone();
    let mut b_now = 0.0;
    for k in 1..=steps {
        let b_k = if k == steps {
            b_target
        } else {
            b_target * k as f64 / steps as f64
        };
        let mut h = b_k - b_now;
        while b_now != b_k {
            let b_next = if (b_k - b_now).abs() <= h.abs() { b_k } else { b_now + h };
            let params = p0.with_b(b_next).map_err(|e| fail(e, &history))?;
            match newton_cycle(&params, &current) {
                Ok((points, _)) => {
                    current = points;
                    b_now = b_next;
                }
                Err(e) => {
                    h /= 2.0;
                    if h.abs() < MIN_B_STEP {
                        return Err(fail(e, &history));
                    }
                }
            }
        }
        let params = p0.with_b(b_k).map_err(|e| fail(e, &history))?;
        let om = orbit_multipliers(&params, &current).map_err(|e| fail(e, &history))?;
        let moduli: Vec<f64> = om.multipliers.iter().map(|m| m.norm()).collect();
        let outside = moduli.iter().filter(|&&m| m > 1.0).count();
        let near = moduli.iter().copied().find(|m| (m - 1.0).abs() <= STABILITY_MARGIN);
        let crossed = outside != unstable_count(history.last().expect("history starts with o"));
        if let Some(m) = near.or(crossed.then(|| closest_to_unit(&moduli))) {
            return Err(fail(
                HenonError::MultiplierCollision { b: b_k, modulus: m },
                &history,
            ));
        }
        history.push(PeriodicOrbit {
            period: o.period,
            points: current.clone(),
            b_value: b_k,
            multipliers: om.multipliers,
            m_x: om.m_x,
            residual: om.residual,
            tangent: false,
        });
    }
    Ok(history)
}

fn unstable_count(o: &PeriodicOrbit) -> usize {
    o.multipliers.iter().filter(|m| m.norm() > 1.0).count()
}

fn closest_to_unit(moduli: &[f64]) -> f64 {
    moduli
        .iter()
        .copied()
        .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
        .unwrap_or(f64::NAN)
}

fn fail(error: HenonError, history: &[PeriodicOrbit]) -> ContinuationFailure {
    ContinuationFailure {
        error,
        partial: history.to_vec(),
    }
}

/// Continues independent orbits in parallel; results keep the input order.
pub fn continue_all(
    p0: &MapParams,
    orbits: &[PeriodicOrbit],
    b_target: f64,
    steps: usize,
) -> Vec<std::result::Result<Vec<PeriodicOrbit>, ContinuationFailure>> {
    orbits
        .par_iter()
        .map(|o| continue_in_b(p0, o, b_target, steps))
        .collect()
}

/// One row of a multiplier track.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackRow {
    pub b: f64,
    /// Multiplier moduli, descending.
    pub moduli: Vec<f64>,
}

pub fn multiplier_track(history: &[PeriodicOrbit]) -> Vec<TrackRow> {
    history
        .iter()
        .map(|o| {
            let mut moduli = o.multiplier_moduli();
            moduli.sort_by(|a, b| b.total_cmp(a));
            TrackRow { b: o.b_value, moduli }
        })
        .collect()
}

/// Step-to-step changes along a multiplier track.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackContinuity {
    /// Largest change of any sorted modulus between consecutive rows.
    pub max_jump: f64,
    pub median_jump: f64,
    /// `max_jump / median_jump`, zero when the track is flat.
    pub max_ratio: f64,
    /// Smallest `C` with every jump `<= C |delta b|`.
    pub fitted_c: f64,
}

pub fn track_continuity(rows: &[TrackRow]) -> TrackContinuity {
    let mut jumps: Vec<f64> = Vec::new();
    let mut fitted_c: f64 = 0.0;
    for w in rows.windows(2) {
        let jump = w[0]
            .moduli
            .iter()
            .zip(&w[1].moduli)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let db = (w[1].b - w[0].b).abs();
        if db > 0.0 {
            fitted_c = fitted_c.max(jump / db);
        }
        jumps.push(jump);
    }
    if jumps.is_empty() {
        return TrackContinuity {
            max_jump: 0.0,
            median_jump: 0.0,
            max_ratio: 0.0,
            fitted_c: 0.0,
        };
    }
    let max_jump = jumps.iter().copied().fold(0.0, f64::max);
    let mut sorted = jumps.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median_jump = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    let max_ratio = if median_jump > 0.0 { max_jump / median_jump } else { 0.0 };
    TrackContinuity {
        max_jump,
        median_jump,
        max_ratio,
        fitted_c,
    }
}
