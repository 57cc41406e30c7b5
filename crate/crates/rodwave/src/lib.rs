//! Cross-validating solvers for pulse propagation in an elastic rod with
//! massive ends.
//!
//! An impulsive force P δ(α t) strikes the left end of a rod of length L
//! whose ends carry point masses. The displacement field u(x, t) is
//! computed three independent ways and the routes are checked against
//! each other:
//!
//! * a closed-form residue series over the transform poles ([`series`]),
//! * numerical Bromwich inversion of the transform image ([`laplace`]),
//! * explicit finite-difference time-domain integration ([`fdtd`]).
//!
//! [`point_mass`] carries the impulse response of a free particle and a
//! damped oscillator, the simplest verified layer of the same transform
//! machinery. [`validation`] and [`harness`] compare the routes, check
//! conservation laws and pulse arrival, and assemble a structured
//! report; [`cli`] exposes everything as a command-line tool.

pub mod cli;
pub mod error;
pub mod fdtd;
pub mod field;
pub mod harness;
pub mod laplace;
pub mod model;
pub mod point_mass;
pub mod series;
pub mod transform;
pub mod validation;

pub use error::{Error, Result};
pub use field::DisplacementField;
pub use model::{BoundaryKind, BoundaryMode, ImpulseParams, RodParams, Scenario};
