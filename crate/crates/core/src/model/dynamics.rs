//! Closed-loop right-hand side.

use crate::error::Result;
use crate::model::{ControlField, ControllerConfig, DisturbanceSchedule, PlatoonState, Topology};

/// Time derivative of a platoon state, laid out like [`PlatoonState`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    /// `ds_i/dt` for `i = 2..n`.
    pub spacings: Vec<f64>,
    /// `dv_i/dt` for `i = 1..n`.
    pub speeds: Vec<f64>,
}

impl StateDerivative {
    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = self.spacings.clone();
        y.extend_from_slice(&self.speeds);
        y
    }
}

/// `ds_i/dt = v_{i-1} - v_i`, `dv_i/dt = F_i`.
///
/// Under a disturbance schedule the leader's speed is the prescribed signal at
/// time `t` wherever it enters the equations, and its derivative is the
/// signal's derivative rather than a controller output.
pub fn dynamics_rhs(
    state: &PlatoonState,
    topology: &Topology,
    cfg: &ControllerConfig,
    t: f64,
    disturbance: Option<&DisturbanceSchedule>,
) -> Result<StateDerivative> {
    state.check_shape()?;
    let overridden;
    let state = match disturbance {
        Some(schedule) => {
            let mut with_leader = state.clone();
            with_leader.speeds[0] = schedule.speed(t, cfg.v_star());
            overridden = with_leader;
            &overridden
        }
        None => state,
    };
    let field = ControlField::evaluate(state, topology, cfg)?;
    let spacings = state.speeds.windows(2).map(|w| w[0] - w[1]).collect();
    let mut speeds = field.accel;
    if let Some(schedule) = disturbance {
        speeds[0] = schedule.acceleration(t);
    }
    Ok(StateDerivative { spacings, speeds })
}
