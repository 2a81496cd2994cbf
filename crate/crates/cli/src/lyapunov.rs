//! Largest Lyapunov exponent by tangent-vector iteration with
//! renormalization at every step. A diagnostic for simulation output.

use henon_core::MapParams;
use nalgebra::DVector;

pub struct LyapunovEstimate {
    v: DVector<f64>,
    log_sum: f64,
    steps: usize,
}

impl LyapunovEstimate {
    pub fn new(dim: usize) -> Self {
        LyapunovEstimate {
            v: DVector::from_element(dim, 1.0 / (dim as f64).sqrt()),
            log_sum: 0.0,
            steps: 0,
        }
    }

    /// Pushes the tangent vector through the Jacobian at `x` and returns
    /// the running estimate.
    pub fn advance(&mut self, p: &MapParams, x: f64) -> f64 {
        self.v = p.jacobian_at(x) * &self.v;
        let norm = self.v.norm();
        self.log_sum += norm.ln();
        self.steps += 1;
        if norm > 0.0 && norm.is_finite() {
            self.v /= norm;
        }
        self.estimate()
    }

    pub fn estimate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.log_sum / self.steps as f64
        }
    }
}
