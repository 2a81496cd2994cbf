//! The (n+1)-dimensional Hénon-like map family
//!
//! ```text
//! x' = f(x) + y_1 + ... + y_n
//! y_1' = b x
//! y_{i+1}' = a_i y_i,   i = 1..n-1
//! ```
//!
//! with `|b| < 1` and `|a_i| < 1`. The y-subsystem is measured in the
//! Manhattan (l1) norm throughout.

use crate::error::{HenonError, Result};
use crate::poly::Polynomial;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Orbits whose `|x|` or `||y||_1` exceed this are reported as escaped.
pub const ESCAPE_RADIUS: f64 = 1e100;

/// The scalar nonlinearity `f`.
///
/// `Quadratic` is `mu - x^2`, `Cubic` is `x^3 - mu x`. Both evaluate through
/// the same Horner sequence as their polynomial form, so converting with
/// [`Nonlinearity::to_polynomial`] preserves every value bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Nonlinearity {
    Quadratic { mu: f64 },
    Cubic { mu: f64 },
    /// Coefficients lowest degree first.
    Polynomial { coeffs: Vec<f64> },
}

impl Nonlinearity {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Nonlinearity::Quadratic { mu } => -x * x + mu,
            Nonlinearity::Cubic { mu } => (x * x - mu) * x,
            Nonlinearity::Polynomial { ref coeffs } => horner(coeffs, x),
        }
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Nonlinearity::Quadratic { .. } => -2.0 * x,
            Nonlinearity::Cubic { mu } => 3.0 * x * x - mu,
            Nonlinearity::Polynomial { ref coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * x + c * i as f64;
                }
                acc
            }
        }
    }

    pub fn to_polynomial(&self) -> Polynomial {
        match *self {
            Nonlinearity::Quadratic { mu } => Polynomial::new(vec![mu, 0.0, -1.0]),
            Nonlinearity::Cubic { mu } => Polynomial::new(vec![0.0, -mu, 0.0, 1.0]),
            Nonlinearity::Polynomial { ref coeffs } => Polynomial::new(coeffs.clone()),
        }
    }

    /// Recognises the quadratic and cubic shapes; anything else stays a
    /// general polynomial.
    pub fn from_polynomial(p: &Polynomial) -> Self {
        match *p.coeffs() {
            [mu, b1, b2] if b1 == 0.0 && b2 == -1.0 => Nonlinearity::Quadratic { mu },
            [c0, c1, c2, c3] if c0 == 0.0 && c2 == 0.0 && c3 == 1.0 => {
                Nonlinearity::Cubic { mu: -c1 }
            }
            ref c => Nonlinearity::Polynomial { coeffs: c.to_vec() },
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match *self {
            Nonlinearity::Quadratic { mu } | Nonlinearity::Cubic { mu } => Some(mu),
            Nonlinearity::Polynomial { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            Nonlinearity::Quadratic { mu } | Nonlinearity::Cubic { mu } => mu.is_finite(),
            Nonlinearity::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
        };
        if finite {
            Ok(())
        } else {
            Err(HenonError::InvalidParameter {
                name: "f",
                value: f64::NAN,
                constraint: "finite coefficients",
            })
        }
    }
}

#[inline]
fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut it = coeffs.iter().rev();
    match it.next() {
        Some(&lead) => it.fold(lead, |acc, &c| acc * x + c),
        None => 0.0,
    }
}

/// `||v||_1`
#[inline]
pub fn manhattan_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c.abs()).sum()
}

/// One point `(x, y_1..y_n)` of phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: Vec<f64>,
}

impl State {
    pub fn new(x: f64, y: Vec<f64>) -> Self {
        State { x, y }
    }

    pub fn on_axis(x: f64, n: usize) -> Self {
        State { x, y: vec![0.0; n] }
    }

    pub fn y_norm(&self) -> f64 {
        manhattan_norm(&self.y)
    }

    pub fn is_escaped(&self) -> bool {
        !(self.x.abs() <= ESCAPE_RADIUS && self.y_norm() <= ESCAPE_RADIUS)
    }

    /// Max-norm distance between two states of equal dimension.
    pub fn distance(&self, other: &State) -> f64 {
        self.y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| (a - b).abs())
            .fold((self.x - other.x).abs(), f64::max)
    }

    /// Flattened `[x, y_1, .., y_n]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.y.len() + 1);
        v.push(self.x);
        v.extend_from_slice(&self.y);
        v
    }
}

/// Result of a long endpoint-only run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Bounded(State),
    /// `step` is the index of the first iterate beyond [`ESCAPE_RADIUS`].
    Escaped { step: usize, state: State },
}

/// Full parameterization of the map: nonlinearity, coupling `b` and shift
/// coefficients `a_1..a_{n-1}`. The y-dimension is `n = a.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapParams {
    f: Nonlinearity,
    b: f64,
    a: Vec<f64>,
}

impl MapParams {
    pub fn new(f: Nonlinearity, b: f64, a: Vec<f64>) -> Result<Self> {
        f.validate()?;
        if !(b.abs() < 1.0) {
            return Err(HenonError::InvalidParameter {
                name: "b",
                value: b,
                constraint: "|b| < 1",
            });
        }
        if let Some(&bad) = a.iter().find(|ai| !(ai.abs() < 1.0)) {
            return Err(HenonError::InvalidParameter {
                name: "a_i",
                value: bad,
                constraint: "|a_i| < 1",
            });
        }
        Ok(MapParams { f, b, a })
    }

    /// Two-dimensional map (`n = 1`).
    pub fn planar(f: Nonlinearity, b: f64) -> Result<Self> {
        MapParams::new(f, b, Vec::new())
    }

    pub fn f(&self) -> &Nonlinearity {
        &self.f
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Dimension of the y-subsystem.
    pub fn n(&self) -> usize {
        self.a.len() + 1
    }

    /// `max |a_i|`, zero when `n = 1`.
    pub fn a_bound(&self) -> f64 {
        self.a.iter().fold(0.0, |m, ai| m.max(ai.abs()))
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        MapParams::new(self.f.clone(), b, self.a.clone())
    }

    fn check_dim(&self, s: &State) -> Result<()> {
        if s.y.len() != self.n() {
            return Err(HenonError::DimensionMismatch {
                expected: self.n(),
                found: s.y.len(),
            });
        }
        Ok(())
    }

    /// Advances `(x, y)` in place and returns the new `x`. `y` must have
    /// length `n`; callers on hot paths check this once up front.
    #[inline]
    pub fn step_in_place(&self, x: f64, y: &mut [f64]) -> f64 {
        let sum: f64 = y.iter().sum();
        for i in (1..y.len()).rev() {
            y[i] = self.a[i - 1] * y[i - 1];
        }
        y[0] = self.b * x;
        self.f.eval(x) + sum
    }

    pub fn step(&self, s: &State) -> Result<State> {
        self.check_dim(s)?;
        let mut y = s.y.clone();
        let x = self.step_in_place(s.x, &mut y);
        Ok(State { x, y })
    }

    /// The orbit segment `[s, T(s), .., T^k(s)]`.
    pub fn iterate(&self, s: &State, k: usize) -> Result<Vec<State>> {
        self.check_dim(s)?;
        let mut out = Vec::with_capacity(k + 1);
        out.push(s.clone());
        let mut cur = s.clone();
        for _ in 0..k {
            cur.x = self.step_in_place(cur.x, &mut cur.y);
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Endpoint of `k` steps, stopping early if the orbit escapes.
    pub fn run(&self, s: &State, k: usize) -> Result<RunOutcome> {
        self.check_dim(s)?;
        let mut cur = s.clone();
        for step in 1..=k {
            cur.x = self.step_in_place(cur.x, &mut cur.y);
            if cur.is_escaped() {
                return Ok(RunOutcome::Escaped { step, state: cur });
            }
        }
        Ok(RunOutcome::Bounded(cur))
    }

    /// Lazy orbit starting after `s` (the first item is `T(s)`).
    pub fn orbit(&self, s: &State) -> Result<Orbit<'_>> {
        self.check_dim(s)?;
        Ok(Orbit {
            params: self,
            cur: s.clone(),
        })
    }

    /// Jacobian of the map at any point with first coordinate `x`:
    /// first row `(f'(x), 1, .., 1)`, then `b` and `a_1..a_{n-1}` on the
    /// subdiagonal.
    pub fn jacobian_at(&self, x: f64) -> DMatrix<f64> {
        let dim = self.n() + 1;
        let mut j = DMatrix::zeros(dim, dim);
        j[(0, 0)] = self.f.derivative(x);
        for c in 1..dim {
            j[(0, c)] = 1.0;
        }
        j[(1, 0)] = self.b;
        for (i, &ai) in self.a.iter().enumerate() {
            j[(i + 2, i + 1)] = ai;
        }
        j
    }
}

/// Iterator over successive images of a state.
pub struct Orbit<'a> {
    params: &'a MapParams,
    cur: State,
}

impl Iterator for Orbit<'_> {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        self.cur.x = self.params.step_in_place(self.cur.x, &mut self.cur.y);
        Some(self.cur.clone())
    }
}

/// Coefficients `q_1..q_n` of the conjugate delayed-coordinate form
///
/// ```text
/// x' = f(x) + sum_j q_j v_j,   v_1' = x,   v_{i+1}' = v_i
/// ```
///
/// related to the shift form by `y_i = q_i v_i`, `q_1 = b`,
/// `q_{i+1} = a_i q_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedForm {
    pub q: Vec<f64>,
}

pub fn to_generalized_form(p: &MapParams) -> Result<GeneralizedForm> {
    if p.b() == 0.0 {
        return Err(HenonError::DegenerateSubstitution("b = 0 leaves v undetermined"));
    }
    let mut q = Vec::with_capacity(p.n());
    q.push(p.b());
    for (i, ai) in p.a().iter().enumerate() {
        q.push(ai * q[i]);
    }
    Ok(GeneralizedForm { q })
}

impl GeneralizedForm {
    pub fn step(&self, f: &Nonlinearity, x: f64, v: &[f64]) -> (f64, Vec<f64>) {
        let xn = f.eval(x) + self.q.iter().zip(v).map(|(q, v)| q * v).sum::<f64>();
        let mut vn = Vec::with_capacity(v.len());
        vn.push(x);
        vn.extend_from_slice(&v[..v.len() - 1]);
        (xn, vn)
    }

    pub fn y_from_v(&self, v: &[f64]) -> Vec<f64> {
        self.q.iter().zip(v).map(|(q, v)| q * v).collect()
    }

    /// Inverse of [`GeneralizedForm::y_from_v`]; fails when some `q_i`
    /// vanishes (a zero shift coefficient upstream).
    pub fn v_from_y(&self, y: &[f64]) -> Result<Vec<f64>> {
        if self.q.iter().any(|&q| q == 0.0) {
            return Err(HenonError::DegenerateSubstitution("some q_i = 0"));
        }
        Ok(self.q.iter().zip(y).map(|(q, y)| y / q).collect())
    }
}
