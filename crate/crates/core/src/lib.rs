//! Damped vibrating-string models under a passive boundary damper.
//!
//! The crate simulates four closed-loop string models (plain wave equation,
//! viscous damping, thermoelastic coupling, Kelvin-Voigt damping) plus the
//! linear thermoacoustic system, evaluates the Lyapunov functionals used to
//! prove input-to-state stability for each of them, and computes the
//! explicit constants of those stability estimates so they can be checked
//! along discrete trajectories.
//!
//! Module map:
//! - [`model`]: parameters, variants, disturbances and initial data.
//! - [`discretize`]: uniform grid, difference operators, trapezoid quadrature.
//! - [`banded`]: banded LU factorization used by the implicit solver.
//! - [`solver`]: trapezoidal time stepping and trajectories.
//! - [`functionals`]: energies, Lyapunov functionals and state norms.
//! - [`certificates`]: closed-form ISS constants and the `r` search.
//! - [`harness`]: verification experiments built from the pieces above.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod banded;
pub mod certificates;
pub mod discretize;
mod error;
pub mod functionals;
pub mod harness;
pub mod model;
pub mod solver;

pub use certificates::{IssCertificate, Objective, Theorem};
pub use discretize::Grid;
pub use error::{Error, Result};
pub use functionals::{FunctionalValue, NormRecord};
pub use model::{
    DisturbanceSpec, InitialData, InitialDataSpec, ModelVariant, PhysicalParams, Profile,
    SpaceTimeSignal, SpatialProfile, ThermoacousticParams, TimeSignal, ValidationReport,
};
pub use solver::{StringSolver, StringState, ThermoState, ThermoacousticSolver, Trajectory};

/// Multiplier applied to `h² + Δt²` in every discretization slack.
///
/// Recorded in reports so that a failing margin can be read against it.
pub const SLACK_CONSTANT: f64 = 10.0;

/// Discretization slack `SLACK_CONSTANT · (h² + Δt²)`.
pub fn slack_band(h: f64, dt: f64) -> f64 {
    SLACK_CONSTANT * (h * h + dt * dt)
}
