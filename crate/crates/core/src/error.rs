use thiserror::Error;

/// Errors raised by the map family and the analyses built on it.
///
/// Every variant that rejects an input names the violated constraint so that
/// front ends can surface it in machine-readable form.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HenonError {
    #[error("parameter {name} = {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("state has y-dimension {found}, map expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate substitution: {0}")]
    DegenerateSubstitution(&'static str),

    #[error("coupling too strong: 1 - a_bound - |b| = {margin} <= 0")]
    CouplingTooStrong { margin: f64 },

    #[error("interval [{lo}, {hi}] is not invariant under f (image [{image_lo}, {image_hi}])")]
    IntervalNotInvariant {
        lo: f64,
        hi: f64,
        image_lo: f64,
        image_hi: f64,
    },

    #[error("no real fixed points: discriminant {discriminant} < 0")]
    NoRealFixedPoints { discriminant: f64 },

    #[error("domain degenerate: mu - gamma = {width} <= 0")]
    DomainDegenerate { width: f64 },

    #[error("undersampled arc: {points} points per line, need at least {suggested}")]
    Undersampled { points: usize, suggested: usize },

    #[error("dimension bound exceeded: {size} > {max}")]
    DimensionBound { size: usize, max: usize },

    #[error("not a cycle: closure residual {residual:e} exceeds {tolerance:e}")]
    NotACycle { residual: f64, tolerance: f64 },

    #[error("horseshoe analysis requires a quadratic nonlinearity")]
    NotQuadratic,

    #[error("empty or reversed interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },

    #[error("Newton divergence at b = {b} after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { b: f64, iterations: usize, residual: f64 },

    #[error("multiplier collision with unit circle at b = {b}: |multiplier| = {modulus}")]
    MultiplierCollision { b: f64, modulus: f64 },

    #[error("orbit is not structurally stable: m_x = {m_x}")]
    NotStructurallyStable { m_x: f64 },
}

impl HenonError {
    /// The violated constraint, when the error is an input rejection.
    pub fn constraint(&self) -> Option<String> {
        match self {
            HenonError::InvalidParameter { constraint, .. } => Some((*constraint).to_string()),
            HenonError::DimensionMismatch { .. } => Some("len(y) == n".into()),
            HenonError::DegenerateSubstitution(_) => Some("b != 0".into()),
            HenonError::CouplingTooStrong { .. } => Some("1 - a_bound - |b| > 0".into()),
            HenonError::IntervalNotInvariant { .. } => Some("f(I) within I".into()),
            HenonError::NoRealFixedPoints { .. } => Some("1 + 4(mu - gamma) >= 0".into()),
            HenonError::DomainDegenerate { .. } => Some("mu - gamma > 0".into()),
            HenonError::DimensionBound { .. } => Some("n + 1 <= 64".into()),
            HenonError::NotQuadratic => Some("nonlinearity == quadratic".into()),
            HenonError::BadInterval { .. } => Some("lo < hi".into()),
            HenonError::NotStructurallyStable { .. } => Some("|m_x| > 1e-6 and ||m_x| - 1| > 1e-6".into()),
            HenonError::Undersampled { .. }
            | HenonError::NotACycle { .. }
            | HenonError::NewtonDivergence { .. }
            | HenonError::MultiplierCollision { .. } => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, HenonError>;
