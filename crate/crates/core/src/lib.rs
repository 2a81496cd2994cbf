//! Multidimensional Hénon-like maps with a scalar nonlinearity fed back
//! through a contracting shift-coupled y-subsystem.
//!
//! The crate covers iteration ([`map`]), analytic trapping-domain
//! certificates with sampling oracles ([`trapping`]), the horseshoe
//! covering check ([`horseshoe`]), characteristic polynomials and cycle
//! multipliers ([`spectrum`]) and periodic-orbit continuation ([`orbits`]).

pub mod error;
pub mod horseshoe;
pub mod map;
pub mod orbits;
pub mod poly;
pub mod spectrum;
pub mod trapping;

pub use error::{HenonError, Result};
pub use map::{to_generalized_form, GeneralizedForm, MapParams, Nonlinearity, RunOutcome, State, ESCAPE_RADIUS};
pub use num_complex::Complex64;
pub use orbits::{continue_in_b, find_1d_orbits, structural_stability, PeriodicOrbit};
pub use poly::Polynomial;
pub use spectrum::{char_poly_closed_form, char_poly_determinant, eigenvalues, orbit_multipliers, CharPoly};
pub use trapping::{Certification, TrappingDomain};
