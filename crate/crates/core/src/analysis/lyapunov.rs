//! Lyapunov functions and their time derivatives along the closed loop.

use crate::error::{ModelError, Result};
use crate::model::{
    beta, ControlField, ControlLaw, ControllerConfig, ExtendedSpacings, Gradients, PlatoonState, Topology,
};

/// `(v_max²/2) Σ (v_i - f_i)² / (v_i (v_max - v_i))`.
fn kinetic(speeds: &[f64], targets: &[f64], v_max: f64) -> f64 {
    let sum: f64 = speeds
        .iter()
        .zip(targets)
        .map(|(&v, &f)| (v - f) * (v - f) / (v * (v_max - v)))
        .sum();
    0.5 * v_max * v_max * sum
}

fn targets(grad: &Gradients, cfg: &ControllerConfig, n: usize) -> Vec<f64> {
    (0..n).map(|j| cfg.saturation.complement(grad.imbalance(j))).collect()
}

/// Ring or open-road Lyapunov function.
///
/// On a ring the potential sum runs over all `n` gaps including the closing
/// gap `s_1`; on an open road the boundary gap is infinite and contributes
/// nothing, which leaves the sum over `s_2..s_n`.
pub fn lyapunov_h(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<f64> {
    state.validate(topology, &cfg.potential, &cfg.saturation)?;
    let ext = ExtendedSpacings::new(state, topology);
    let grad = Gradients::new(&ext, &cfg.potential)?;
    let f = targets(&grad, cfg, state.n());
    let potential = ext
        .gaps()
        .iter()
        .map(|&s| cfg.potential.value(s))
        .sum::<Result<f64>>()?;
    Ok(kinetic(&state.speeds, &f, cfg.v_max()) + potential)
}

/// Whether the ring admits only the uniform equilibrium (`R < nλ`).
pub fn has_unique_equilibrium(topology: &Topology, n: usize, cfg: &ControllerConfig) -> bool {
    match topology.ring_length() {
        Some(r) => r < n as f64 * cfg.potential.interaction_distance,
        None => false,
    }
}

/// Shifted ring Lyapunov function `H - n V(R/n)`, zero only at the uniform
/// equilibrium.
///
/// Evaluated as the kinetic part plus `Σ [V(s_i) - V(c) - V'(c)(s_i - c)]`
/// with `c = R/n`; the linear terms cancel because the gaps sum to `R`, and
/// each bracket is nonnegative by convexity of `V`.
pub fn lyapunov_u(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<f64> {
    let n = state.n();
    let Some(length) = topology.ring_length() else {
        return Err(ModelError::Unsupported("U is defined on a ring only".into()));
    };
    if !has_unique_equilibrium(topology, n, cfg) {
        return Err(ModelError::InvalidParameter(format!(
            "U needs R < n lambda, got R = {length}, n lambda = {}",
            n as f64 * cfg.potential.interaction_distance
        )));
    }
    state.validate(topology, &cfg.potential, &cfg.saturation)?;
    let ext = ExtendedSpacings::new(state, topology);
    let grad = Gradients::new(&ext, &cfg.potential)?;
    let f = targets(&grad, cfg, n);
    let c = length / n as f64;
    let vc = cfg.potential.value(c)?;
    let dc = cfg.potential.d1(c)?;
    let mut excess = 0.0;
    for &s in ext.gaps() {
        excess += cfg.potential.value(s)? - vc - dc * (s - c);
    }
    Ok(kinetic(&state.speeds, &f, cfg.v_max()) + excess.max(0.0))
}

/// Closed-form derivative of `H` along the bidirectional closed loop:
///
/// `-μ v_max² Σ (v_i - f_i)²/(v_i(v_max - v_i)) - Σ b(Δ_i) Δ_i`,
/// `Δ_i = V'(s_{i+1}) - V'(s_i)`. Nonpositive everywhere.
pub fn hdot_analytic(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<f64> {
    if cfg.law != ControlLaw::Bidirectional {
        return Err(ModelError::Unsupported(
            "no closed-form Lyapunov derivative for the baseline law".into(),
        ));
    }
    let (friction, coupling) = hdot_parts(state, topology, cfg)?;
    Ok(friction + coupling)
}

/// The two summands of [`hdot_analytic`], each nonpositive.
pub fn hdot_parts(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<(f64, f64)> {
    state.validate(topology, &cfg.potential, &cfg.saturation)?;
    let ext = ExtendedSpacings::new(state, topology);
    let grad = Gradients::new(&ext, &cfg.potential)?;
    let f = targets(&grad, cfg, state.n());
    let friction = -2.0 * cfg.mu * kinetic(&state.speeds, &f, cfg.v_max());
    let coupling = -(0..state.n())
        .map(|j| {
            let d = grad.imbalance(j);
            cfg.saturation.value(d) * d
        })
        .sum::<f64>();
    Ok((friction, coupling))
}

/// Derivative of `H` assembled by the chain rule from the accelerations of
/// the active law:
///
/// `Σ V'(s_i)(v_{i-1} - v_i) + Σ (v_i - f_i) β(v_i, f_i) F_i
///  - Σ (v_i - f_i) Z_i / (v_i (v_max - v_i))`.
///
/// Valid for either law; for the bidirectional law it must agree with
/// [`hdot_analytic`].
pub fn hdot_chain_rule(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<f64> {
    state.validate(topology, &cfg.potential, &cfg.saturation)?;
    let ext = ExtendedSpacings::new(state, topology);
    let grad = Gradients::new(&ext, &cfg.potential)?;
    let field = ControlField::from_gradients(state, topology, cfg, &grad)?;
    let vm = cfg.v_max();
    let mut total = 0.0;
    for j in 0..state.n() {
        let v = state.speeds[j];
        let f = field.targets[j];
        total += grad.d1[j] * (state.speed_ahead(j, topology) - v);
        total += (v - f) * beta(v, f, vm)? * field.accel[j];
        total -= (v - f) * field.viscosity[j] / (v * (vm - v));
    }
    Ok(total)
}

/// `H`, `U` (unique-equilibrium ring only) and the closed-form `dH/dt`
/// (bidirectional law only) at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    pub h: f64,
    pub u: Option<f64>,
    pub hdot: Option<f64>,
}

impl LyapunovSample {
    pub fn evaluate(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<Self> {
        let h = lyapunov_h(state, topology, cfg)?;
        let u = if has_unique_equilibrium(topology, state.n(), cfg) {
            Some(lyapunov_u(state, topology, cfg)?)
        } else {
            None
        };
        let hdot = match cfg.law {
            ControlLaw::Bidirectional => Some(hdot_analytic(state, topology, cfg)?),
            ControlLaw::Baseline { .. } => None,
        };
        Ok(Self { h, u, hdot })
    }
}
