//! Numerical checks of the trapping claims: random one-step samples and a
//! deterministic brute-force iteration grid.

use super::{in_dy, TrappingDomain};
use crate::error::{HenonError, Result};
use crate::map::{manhattan_norm, MapParams, Nonlinearity, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

/// Outcome of a one-step sampling check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub check: &'static str,
    pub passed: bool,
    pub samples: usize,
    pub failures: usize,
    /// Smallest slack over all samples; negative when some sample failed.
    pub worst_margin: f64,
    /// First failing preimage, in sample order.
    pub counterexample: Option<State>,
}

/// Uniform samples from `D_alpha`: x uniform on the open interval, y uniform
/// in the open l1-ball of radius gamma.
pub fn sample_domain(p: &MapParams, d: &TrappingDomain, samples: usize, seed: u64) -> Vec<State> {
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![0.0; n + 1];
    (0..samples)
        .map(|_| {
            let x = loop {
                let x = rng.random_range(d.alpha_minus..d.alpha_plus);
                if x > d.alpha_minus {
                    break x;
                }
            };
            // Dirichlet(1, .., 1) over n + 1 slots, last slot dropped, gives a
            // uniform point of the l1-simplex interior.
            for w in weights.iter_mut() {
                *w = rng.sample::<f64, _>(Exp1);
            }
            let total: f64 = weights.iter().sum();
            let y = weights[..n]
                .iter()
                .map(|w| {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    sign * d.gamma * w / total
                })
                .collect();
            State::new(x, y)
        })
        .collect()
}

fn summarize(check: &'static str, points: &[State], margins: Vec<(f64, bool)>) -> SampleReport {
    let failures = margins.iter().filter(|(_, ok)| !ok).count();
    let worst_margin = margins.iter().map(|(m, _)| *m).fold(f64::INFINITY, f64::min);
    let counterexample = margins
        .iter()
        .position(|(_, ok)| !ok)
        .map(|i| points[i].clone());
    SampleReport {
        check,
        passed: failures == 0,
        samples: points.len(),
        failures,
        worst_margin,
        counterexample,
    }
}

/// One step from every point must land in `D = R x D_y`.
pub fn lemma1_check_points(p: &MapParams, d: &TrappingDomain, points: &[State]) -> Result<SampleReport> {
    let margins = points
        .par_iter()
        .map(|s| {
            let img = p.step(s)?;
            let norm = img.y_norm();
            Ok((d.gamma - norm, in_dy(norm, d.gamma)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("lemma1", points, margins))
}

pub fn lemma1_check(p: &MapParams, d: &TrappingDomain, samples: usize, seed: u64) -> Result<SampleReport> {
    let points = sample_domain(p, d, samples.max(1), seed);
    lemma1_check_points(p, d, &points)
}

/// `f(x) - gamma < x' < f(x) + gamma` and `||y'||_1 < gamma` for every point.
pub fn sandwich_check_points(p: &MapParams, d: &TrappingDomain, points: &[State]) -> Result<SampleReport> {
    let g = d.gamma;
    let margins = points
        .par_iter()
        .map(|s| {
            let img = p.step(s)?;
            let fx = p.f().eval(s.x);
            let norm = img.y_norm();
            let (lo, hi) = (img.x - (fx - g), (fx + g) - img.x);
            let margin = lo.min(hi).min(g - norm);
            let ok = if g == 0.0 {
                img.x == fx && norm == 0.0
            } else {
                lo > 0.0 && hi > 0.0 && norm < g
            };
            Ok((margin, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("sandwich", points, margins))
}

pub fn sandwich_check(p: &MapParams, d: &TrappingDomain, samples: usize, seed: u64) -> Result<SampleReport> {
    let points = sample_domain(p, d, samples.max(1), seed);
    sandwich_check_points(p, d, &points)
}

/// First violation seen along one seed's orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleFailure {
    pub seed: State,
    pub step: usize,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub passed: bool,
    pub certified: bool,
    pub seeds: usize,
    pub iterations: usize,
    /// Orbits that left `R x D_y` at some step.
    pub left_d: usize,
    /// Orbits that left `D_alpha` at some step.
    pub left_d_alpha: usize,
    /// Orbits that diverged past the escape radius.
    pub escaped: usize,
    /// `min(x - alpha-, alpha+ - x)` over all visited points (until exit).
    pub worst_x_margin: f64,
    /// `min(gamma - ||y||_1)` over all visited points (until exit).
    pub worst_y_margin: f64,
    pub counterexample: Option<OracleFailure>,
}

/// Deterministic seed grid for the brute-force oracle: `grid_density`
/// x-values spanning the open interval (both ends within a relative 1e-9)
/// crossed with `grid_density` y-vectors, most of them on the l1-sphere of
/// radius `gamma (1 - 1e-9)` and every fourth on an interior ray.
pub fn oracle_seeds(n: usize, d: &TrappingDomain, grid_density: usize) -> Vec<State> {
    let g = grid_density.max(2);
    let width = d.alpha_plus - d.alpha_minus;
    let xs: Vec<f64> = (0..g)
        .map(|i| {
            let t = 1e-9 + (1.0 - 2e-9) * i as f64 / (g - 1) as f64;
            d.alpha_minus + width * t
        })
        .collect();
    let rim = d.gamma * (1.0 - 1e-9);
    let interior_rays = g / 4 + 1;
    let ys: Vec<Vec<f64>> = (0..g)
        .map(|j| {
            let radius = if j % 4 == 3 {
                rim * ((j / 4) + 1) as f64 / (interior_rays + 1) as f64
            } else {
                rim
            };
            let dir = sphere_direction(n, j);
            dir.into_iter().map(|c| c * radius).collect()
        })
        .collect();
    let mut seeds = Vec::with_capacity(g * g);
    for &x in &xs {
        for y in &ys {
            seeds.push(State::new(x, y.clone()));
        }
    }
    seeds
}

/// Deterministic unit vector in the l1 norm. The first `2n` indices are the
/// vertices `+-e_i`; later ones spread over the faces by an additive
/// recurrence with irrational steps.
fn sphere_direction(n: usize, j: usize) -> Vec<f64> {
    if j < 2 * n {
        let mut v = vec![0.0; n];
        v[j / 2] = if j % 2 == 0 { 1.0 } else { -1.0 };
        return v;
    }
    const STEPS: [f64; 8] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_79,
        0.449_489_742_783_178,
        0.645_751_311_064_591,
        0.316_624_790_355_4,
        0.605_551_275_463_989,
    ];
    let k = (j + 1) as f64;
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let u = (k * STEPS[i % STEPS.len()] + 0.5 * (i / STEPS.len()) as f64).fract();
            let w = -(u.max(1e-12)).ln();
            // sign pattern walks through all 2^n orthants
            if (j >> (i % 32)) & 1 == 0 {
                w
            } else {
                -w
            }
        })
        .collect();
    let norm = manhattan_norm(&v);
    v.iter_mut().for_each(|c| *c /= norm);
    v
}

struct SeedTrace {
    left_d: bool,
    left_d_alpha: bool,
    escaped: bool,
    x_margin: f64,
    y_margin: f64,
    failure: Option<(usize, State)>,
}

fn trace_seed<F: Fn(f64) -> f64>(
    f: &F,
    p: &MapParams,
    d: &TrappingDomain,
    seed: &State,
    iterations: usize,
    y: &mut [f64],
    saved: &mut [f64],
) -> SeedTrace {
    let (b, a) = (p.b(), p.a());
    let mut x = seed.x;
    y.copy_from_slice(&seed.y);
    let mut t = SeedTrace {
        left_d: false,
        left_d_alpha: false,
        escaped: false,
        x_margin: f64::INFINITY,
        y_margin: f64::INFINITY,
        failure: None,
    };

    // Brent-style cycle check: once the state repeats exactly, every later
    // iterate has already been inspected.
    let mut saved_x = x;
    saved.copy_from_slice(y);
    let mut power = 1usize;
    let mut since = 0usize;

    for step in 1..=iterations {
        let sum: f64 = y.iter().sum();
        for i in (1..y.len()).rev() {
            y[i] = a[i - 1] * y[i - 1];
        }
        y[0] = b * x;
        x = f(x) + sum;

        let norm: f64 = y.iter().map(|c| c.abs()).sum();
        let in_d = in_dy(norm, d.gamma);
        let in_x = x > d.alpha_minus && x < d.alpha_plus;
        if !t.left_d_alpha {
            t.x_margin = t.x_margin.min((x - d.alpha_minus).min(d.alpha_plus - x));
            t.y_margin = t.y_margin.min(d.gamma - norm);
            if !(in_d && in_x) {
                t.left_d_alpha = true;
                t.failure = Some((step, State::new(x, y.to_vec())));
            }
        }
        if !in_d {
            t.left_d = true;
        }
        if !(x.abs() <= crate::map::ESCAPE_RADIUS && norm <= crate::map::ESCAPE_RADIUS) {
            t.escaped = true;
        }
        if t.left_d || t.escaped {
            break;
        }

        if x == saved_x && y == saved {
            break;
        }
        since += 1;
        if since == power {
            saved_x = x;
            saved.copy_from_slice(y);
            power *= 2;
            since = 0;
        }
    }
    t
}

/// Iterates every seed of [`oracle_seeds`] for `iterations` steps and checks
/// that no orbit leaves `R x D_y`, and, for an analytically certified domain,
/// that none leaves `D_alpha` either.
pub fn brute_force_trap_oracle(
    p: &MapParams,
    d: &TrappingDomain,
    grid_density: usize,
    iterations: usize,
) -> Result<OracleReport> {
    if grid_density < 2 {
        return Err(HenonError::InvalidParameter {
            name: "grid_density",
            value: grid_density as f64,
            constraint: "grid_density >= 2",
        });
    }
    let n = p.n();
    let seeds = oracle_seeds(n, d, grid_density);
    let traces: Vec<SeedTrace> = match *p.f() {
        Nonlinearity::Quadratic { mu } => run_all(&|x: f64| -x * x + mu, p, d, &seeds, iterations),
        Nonlinearity::Cubic { mu } => run_all(&|x: f64| (x * x - mu) * x, p, d, &seeds, iterations),
        ref f @ Nonlinearity::Polynomial { .. } => run_all(&|x: f64| f.eval(x), p, d, &seeds, iterations),
    };

    let certified = d.is_certified();
    let mut report = OracleReport {
        passed: true,
        certified,
        seeds: seeds.len(),
        iterations,
        left_d: 0,
        left_d_alpha: 0,
        escaped: 0,
        worst_x_margin: f64::INFINITY,
        worst_y_margin: f64::INFINITY,
        counterexample: None,
    };
    for (seed, t) in seeds.iter().zip(traces) {
        report.left_d += t.left_d as usize;
        report.left_d_alpha += t.left_d_alpha as usize;
        report.escaped += t.escaped as usize;
        report.worst_x_margin = report.worst_x_margin.min(t.x_margin);
        report.worst_y_margin = report.worst_y_margin.min(t.y_margin);
        if report.counterexample.is_none() {
            if let Some((step, state)) = t.failure {
                report.counterexample = Some(OracleFailure {
                    seed: seed.clone(),
                    step,
                    state,
                });
            }
        }
    }
    report.passed = report.left_d == 0 && (!certified || report.left_d_alpha == 0);
    Ok(report)
}

fn run_all<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    p: &MapParams,
    d: &TrappingDomain,
    seeds: &[State],
    iterations: usize,
) -> Vec<SeedTrace> {
    let n = p.n();
    seeds
        .par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; n]),
            |(y, saved), s| trace_seed(f, p, d, s, iterations, y, saved),
        )
        .collect()
}
