//! Random states: uniform in the state space, and uniform in ring sublevel sets.

use rand::Rng;

use crate::analysis::{level_set_bounds, lyapunov_h};
use crate::error::{ModelError, Result};
use crate::model::{ControllerConfig, PlatoonState, Topology};

/// Gaps on an open road are drawn from `(L, L + OPEN_SPAN_FACTOR λ)`.
pub const OPEN_SPAN_FACTOR: f64 = 4.0;

/// Rejection-samples a state uniformly from the state space.
///
/// On a ring the proposal box is `(L, R - (n-1)L)^{n-1} × (0, v_max)^n` and a
/// draw is kept when the closing gap also exceeds `L`. The open-road state
/// space is unbounded, so gaps are taken from `(L, L + 4λ)`, which covers
/// compressed and free-flowing gaps alike.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    topology: &Topology,
    n: usize,
    cfg: &ControllerConfig,
) -> Result<PlatoonState> {
    topology.validate(n, &cfg.potential)?;
    let l = cfg.potential.safety_distance;
    let hi = match *topology {
        Topology::Ring { length } => length - (n - 1) as f64 * l,
        Topology::Open => l + OPEN_SPAN_FACTOR * cfg.potential.interaction_distance,
    };
    loop {
        let spacings: Vec<f64> = (1..n).map(|_| rng.gen_range(l..hi)).collect();
        let speeds = (0..n).map(|_| rng.gen_range(0.0..cfg.v_max())).collect();
        let state = PlatoonState::new(spacings, speeds)?;
        if state.validate(topology, &cfg.potential, &cfg.saturation).is_ok() {
            return Ok(state);
        }
    }
}

/// [`random_state`] conditioned on `H <= h_max`.
///
/// Uniform draws from the whole state space include states whose target
/// speeds sit closer to `v_max` than one ulp; trajectories from there pin a
/// speed at the largest double below `v_max` and cannot be stepped further.
/// A finite energy cap keeps every trajectory of a nonincreasing `H` inside
/// a compact set that is representable. Gives up after `max_proposals`.
pub fn random_state_below<R: Rng + ?Sized>(
    rng: &mut R,
    h_max: f64,
    topology: &Topology,
    n: usize,
    cfg: &ControllerConfig,
    max_proposals: usize,
) -> Result<PlatoonState> {
    if !(h_max > 0.0) {
        return Err(ModelError::InvalidParameter(format!(
            "energy cap must be positive, got {h_max}"
        )));
    }
    for _ in 0..max_proposals {
        let state = random_state(rng, topology, n, cfg)?;
        if lyapunov_h(&state, topology, cfg)? <= h_max {
            return Ok(state);
        }
    }
    Err(ModelError::InvalidParameter(format!(
        "no state with H <= {h_max} in {max_proposals} proposals"
    )))
}

/// A state drawn uniformly from `{H <= r}` on a ring, and the number of
/// proposals it took.
///
/// Proposal: gaps `(1 - slack) c + e` with `e` uniform on the simplex that
/// closes the ring, and speeds `f_i + u_i` with `u_i` uniform in
/// `±(1 + slack) √(r/2)`. Every state with `H <= r` has gaps at least `c` and
/// `|v_i - f_i| <= √(r/2)`, so the proposal covers the whole sublevel set
/// with room on every side; the shear `v = f(s) + u` has unit Jacobian.
pub fn sample_sublevel_set<R: Rng + ?Sized>(
    rng: &mut R,
    r: f64,
    topology: &Topology,
    n: usize,
    cfg: &ControllerConfig,
    slack: f64,
    max_proposals: usize,
) -> Result<(PlatoonState, usize)> {
    let Some(length) = topology.ring_length() else {
        return Err(ModelError::Unsupported("sublevel sampling is defined on a ring".into()));
    };
    if !(slack > 0.0 && slack < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "slack must lie in (0, 1), got {slack}"
        )));
    }
    let bounds = level_set_bounds(r, cfg)?;
    let floor = ((1.0 - slack) * bounds.c).max(cfg.potential.safety_distance);
    let spare = length - n as f64 * floor;
    if spare <= 0.0 {
        return Err(ModelError::InvalidParameter(format!(
            "sublevel set {{H <= {r}}} is empty: gaps of at least {} do not fit in {length}",
            bounds.c
        )));
    }
    let half_width = (1.0 + slack) * (0.5 * r).sqrt();
    let ring = *topology;
    for k in 1..=max_proposals {
        // Uniform point on the simplex from sorted uniforms.
        let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..spare)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut gaps = Vec::with_capacity(n);
        let mut prev = 0.0;
        for &c in cuts.iter().chain(std::iter::once(&spare)) {
            gaps.push(floor + (c - prev));
            prev = c;
        }
        let spacings = gaps[1..].to_vec();
        let probe = PlatoonState::new(spacings.clone(), vec![cfg.v_star(); n])?;
        if probe.validate(&ring, &cfg.potential, &cfg.saturation).is_err() {
            continue;
        }
        let ext = crate::model::ExtendedSpacings::new(&probe, &ring);
        let speeds = (0..n)
            .map(|j| {
                let f = crate::model::target_speed(j, &ext, cfg)?;
                Ok(f + rng.gen_range(-half_width..half_width))
            })
            .collect::<Result<Vec<f64>>>()?;
        let state = PlatoonState::new(spacings, speeds)?;
        if state.validate(&ring, &cfg.potential, &cfg.saturation).is_err() {
            continue;
        }
        if lyapunov_h(&state, &ring, cfg)? <= r {
            return Ok((state, k));
        }
    }
    Err(ModelError::InvalidParameter(format!(
        "no state with H <= {r} in {max_proposals} proposals"
    )))
}
