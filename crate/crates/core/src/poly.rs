//! Dense real polynomials with coefficients stored lowest degree first.
//!
//! Only what the map analyses need: Horner evaluation, ring arithmetic for
//! the characteristic-polynomial recursion, and real root isolation on a
//! bounded interval by recursive splitting at derivative roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `s^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Polynomial { coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Degree of the polynomial; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut it = self.coeffs.iter().rev();
        match it.next() {
            Some(&lead) => it.fold(lead, |acc, &c| acc * x + c),
            None => 0.0,
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_i| |x|^i`, the scale against which `|p(x)|` is judged small.
    pub fn magnitude_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    /// Real roots in the closed interval `[lo, hi]`, sorted ascending.
    ///
    /// The interval is split at the real roots of the derivative (found
    /// recursively), so every piece is monotone and holds at most one simple
    /// root, located by bisection to machine precision. Critical points where
    /// the polynomial vanishes to rounding are reported as (even-multiplicity)
    /// roots.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !(lo <= hi) {
            return Vec::new();
        }
        match self.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if r >= lo && r <= hi {
                    vec![r]
                } else {
                    Vec::new()
                }
            }
            Some(_) => {
                let critical = self.derivative().real_roots_in(lo, hi);
                let mut knots = Vec::with_capacity(critical.len() + 2);
                knots.push(lo);
                knots.extend(critical.iter().copied().filter(|&c| c > lo && c < hi));
                knots.push(hi);

                let mut roots = Vec::new();
                for w in knots.windows(2) {
                    let (u, v) = (w[0], w[1]);
                    let (pu, pv) = (self.eval(u), self.eval(v));
                    if pu == 0.0 {
                        roots.push(u);
                    } else if pu * pv < 0.0 {
                        roots.push(bisect(|x| self.eval(x), u, v, pu));
                    }
                }
                if self.eval(hi) == 0.0 {
                    roots.push(hi);
                }
                for &c in &critical {
                    let pc = self.eval(c);
                    if pc != 0.0 && pc.abs() <= 64.0 * f64::EPSILON * self.magnitude_at(c) {
                        roots.push(c);
                    }
                }
                roots.sort_by(|a, b| a.total_cmp(b));
                roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
                roots
            }
        }
    }
}

/// Bisection on a bracketing interval down to adjacent floats.
pub(crate) fn bisect<F: Fn(f64) -> f64>(g: F, mut u: f64, mut v: f64, mut gu: f64) -> f64 {
    for _ in 0..2000 {
        let m = 0.5 * (u + v);
        if m <= u.min(v) || m >= u.max(v) {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (gu < 0.0) {
            u = m;
            gu = gm;
        } else {
            v = m;
        }
    }
    if g(u).abs() <= g(v).abs() {
        u
    } else {
        v
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}
