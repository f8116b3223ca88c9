//! Simulation and verification lab for a bidirectional nonlinear cruise
//! controller on ring-roads and open roads.
//!
//! - [`model`]: potential, saturation, control laws and the closed-loop vector field.
//! - [`analysis`]: Lyapunov functions, decay identities, equilibrium sets and bounds.
//! - [`sim`]: barrier-aware integration, trajectories and invariant monitors.
//! - [`lab`]: scenario files, presets, CSV/plot emission, verification and sweeps.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod lab;
pub mod model;
pub mod sim;

pub use error::ModelError;
