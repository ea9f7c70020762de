//! statvac: a verification laboratory for static vacuum metrics with
//! negative cosmological constant.
//!
//! The crate evaluates metric components through truncated Taylor (jet)
//! arithmetic, so every curvature quantity carries exact derivatives at the
//! evaluation point. On top of that sit a catalog of closed-form model
//! geometries, pointwise identity verifiers, deterministic quadrature, and
//! conformal-boundary asymptotics (gauge normalization, expansion-coefficient
//! extraction, mass functionals).

pub mod asymptotics;
pub mod catalog;
pub mod integrate;
pub mod geometry;
pub mod jet;
pub mod numeric;
pub mod verify;

pub use jet::{Jet, JetError};
