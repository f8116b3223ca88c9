//! Integration of the closed loop, trajectory diagnostics and monitors.

mod fit;
mod integrator;
mod monitors;
mod observables;
mod trajectory;

pub use crate::model::{disturbance_signal, DisturbanceSchedule};
pub use fit::{above_floor, convergence_time, fit_decay_rate, DecayFit, MIN_FIT_POINTS};
pub use integrator::{solve, DenseStep, IntegratorSettings, Method, OdeSystem, Outcome, StepStats, Termination};
pub use monitors::{run_monitors, MonitorKind, MonitorReport, MonitorResult, MonitorToggles};
pub use observables::StringAttenuation;
pub use trajectory::{has_u, integrate, Problem, Sample, Trajectory};
