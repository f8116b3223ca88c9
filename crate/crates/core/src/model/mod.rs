//! Closed-form model: potential, saturation, control laws and the closed-loop
//! vector field. No integration, no I/O.

mod controller;
mod disturbance;
mod dynamics;
mod potential;
mod saturation;
mod state;

pub use controller::{
    accel_baseline, accel_bidirectional, baseline_g, beta, target_speed, viscosity, ControlField, ControlLaw,
    ControllerConfig, Gradients,
};
pub use disturbance::{disturbance_signal, DisturbanceSchedule, WINDOW_END, WINDOW_START};
pub use dynamics::{dynamics_rhs, StateDerivative};
pub use potential::PotentialSpec;
pub use saturation::SaturationSpec;
pub use state::{ExtendedSpacings, PlatoonState, Topology};
