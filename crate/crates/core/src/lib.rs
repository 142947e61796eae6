//! Simulator and verifier for a momentum-clock acting as a control device:
//! a particle-on-a-line clock switches a perturbation on a small quantum
//! system, and a family of time-energy inequalities constrains how fast the
//! controlled state can deviate from free evolution.
//!
//! Layering, bottom up:
//! - [`statelib`]: density-matrix algebra (fidelity, trace distance,
//!   projectors, entropy);
//! - [`model`]: grid, strictly localized packets, coupling profiles and the
//!   structural conditions on the interaction;
//! - [`propagator`]: free translation, Strang split-operator evolution and a
//!   dense brute-force oracle;
//! - [`oracle`]: closed-form branch solution for diagonal coupling;
//! - [`bounds`]: the inequality suite with signed margins;
//! - [`runner`]: config-driven scenarios, artifacts and exit statuses.

// Validation guards use `!(x > 0.0)` deliberately: the negated form also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
mod fft;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod runner;
pub mod statelib;

pub use error::{Error, Result};
