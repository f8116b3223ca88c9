//! Cruise control laws.
//!
//! The bidirectional law steers each vehicle towards a spacing-dependent target
//! speed `f_i = v* - b(V'(s_{i+1}) - V'(s_i))` while the potential gradients
//! from the gaps ahead and behind push it away from both neighbours. The
//! baseline law uses the constant target `v*` with a state-dependent gain.

use serde::{Deserialize, Serialize};

use crate::error::{outside, ModelError, Result};
use crate::model::{ExtendedSpacings, PlatoonState, PotentialSpec, SaturationSpec, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ControlLaw {
    /// Bidirectional law with spacing-dependent target speed and viscosity.
    Bidirectional,
    /// Constant-target law with gain `k_i(s)` smoothed by `g`.
    Baseline { mu_tilde: f64, epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub law: ControlLaw,
    /// Friction gain `μ` (1/s).
    pub mu: f64,
    pub potential: PotentialSpec,
    pub saturation: SaturationSpec,
}

impl ControllerConfig {
    pub fn bidirectional(mu: f64, potential: PotentialSpec, saturation: SaturationSpec) -> Result<Self> {
        let cfg = Self {
            law: ControlLaw::Bidirectional,
            mu,
            potential,
            saturation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "friction gain mu must be positive, got {}",
                self.mu
            )));
        }
        if let ControlLaw::Baseline { mu_tilde, epsilon } = self.law {
            if !(mu_tilde > 0.0 && epsilon > 0.0 && mu_tilde.is_finite() && epsilon.is_finite()) {
                return Err(ModelError::InvalidParameter(format!(
                    "baseline law needs mu_tilde > 0 and epsilon > 0, got {mu_tilde}, {epsilon}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_law(mut self, law: ControlLaw) -> Self {
        self.law = law;
        self
    }

    pub fn v_star(&self) -> f64 {
        self.saturation.v_star()
    }

    pub fn v_max(&self) -> f64 {
        self.saturation.v_max()
    }
}

/// Kinetic weight `β(v, y)`, strictly positive on `(0, v_max)²`.
pub fn beta(v: f64, y: f64, v_max: f64) -> Result<f64> {
    if !(v > 0.0 && v < v_max) {
        return Err(outside("speed", v, format!("(0, {v_max})")));
    }
    if !(y >= 0.0 && y <= v_max) {
        return Err(outside("target speed", y, format!("(0, {v_max})")));
    }
    let vm2 = v_max * v_max;
    let gap = v_max - v;
    Ok((vm2 * v_max * (v + y) - 2.0 * vm2 * y * v) / (2.0 * gap * gap * v * v))
}

/// Smoothing function of the baseline gain: zero below `-ε`, quadratic on
/// `(-ε, 0)`, affine with slope one from `0` on. `C¹` at both breakpoints.
pub fn baseline_g(x: f64, epsilon: f64) -> f64 {
    if x <= -epsilon {
        0.0
    } else if x < 0.0 {
        (x + epsilon) * (x + epsilon) / (2.0 * epsilon)
    } else {
        (epsilon * epsilon + 2.0 * epsilon * x) / (2.0 * epsilon)
    }
}

/// Potential derivatives at every extended spacing `s_1..s_{n+1}`.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl Gradients {
    pub fn new(ext: &ExtendedSpacings, potential: &PotentialSpec) -> Result<Self> {
        let s = ext.as_slice();
        let d1 = s.iter().map(|&x| potential.d1(x)).collect::<Result<Vec<_>>>()?;
        let d2 = s.iter().map(|&x| potential.d2(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { d1, d2 })
    }

    /// `V'(s_{i+1}) - V'(s_i)` for vehicle `j`.
    pub fn imbalance(&self, j: usize) -> f64 {
        self.d1[j + 1] - self.d1[j]
    }
}

/// Everything the bidirectional law needs about one vehicle.
struct Local {
    v_ahead: f64,
    v: f64,
    v_behind: f64,
    d1_ahead: f64,
    d1_behind: f64,
    d2_ahead: f64,
    d2_behind: f64,
}

impl Local {
    fn gather(j: usize, state: &PlatoonState, topology: &Topology, grad: &Gradients) -> Self {
        Self {
            v_ahead: state.speed_ahead(j, topology),
            v: state.speeds[j],
            v_behind: state.speed_behind(j, topology),
            d1_ahead: grad.d1[j],
            d1_behind: grad.d1[j + 1],
            d2_ahead: grad.d2[j],
            d2_behind: grad.d2[j + 1],
        }
    }

    fn imbalance(&self) -> f64 {
        self.d1_behind - self.d1_ahead
    }

    fn target(&self, sat: &SaturationSpec) -> f64 {
        sat.complement(self.imbalance())
    }

    fn viscosity(&self, sat: &SaturationSpec) -> f64 {
        let vm = sat.v_max();
        -vm * vm
            * sat.d1(self.imbalance())
            * (self.d2_behind * (self.v - self.v_behind) - self.d2_ahead * (self.v_ahead - self.v))
    }

    fn bidirectional(&self, cfg: &ControllerConfig) -> Result<f64> {
        let sat = &cfg.saturation;
        let vm = sat.v_max();
        let f = self.target(sat);
        let z = self.viscosity(sat);
        let weight = beta(self.v, f, vm)?;
        let friction = (z - cfg.mu * vm * vm * (self.v - f)) / (self.v * (vm - self.v));
        Ok((friction + self.d1_ahead - self.d1_behind) / weight)
    }

    fn baseline(&self, cfg: &ControllerConfig, mu_tilde: f64, epsilon: f64) -> Result<f64> {
        let vm = cfg.v_max();
        let vs = cfg.v_star();
        if !(self.v > 0.0 && self.v < vm) {
            return Err(outside("speed", self.v, format!("(0, {vm})")));
        }
        let push = self.d1_ahead - self.d1_behind;
        let gain = mu_tilde + vm * baseline_g(push, epsilon) / (vs * (vm - vs)) - push / vs;
        Ok(-gain * (self.v - vs) + push)
    }
}

/// Spacing-dependent target speed `f_i` of vehicle `j`.
pub fn target_speed(j: usize, ext: &ExtendedSpacings, cfg: &ControllerConfig) -> Result<f64> {
    let ahead = cfg.potential.d1(ext.ahead(j))?;
    let behind = cfg.potential.d1(ext.behind(j))?;
    Ok(cfg.saturation.complement(behind - ahead))
}

/// Viscosity term `Z_i` of vehicle `j`.
pub fn viscosity(
    j: usize,
    state: &PlatoonState,
    ext: &ExtendedSpacings,
    topology: &Topology,
    cfg: &ControllerConfig,
) -> Result<f64> {
    let grad = Gradients::new(ext, &cfg.potential)?;
    Ok(Local::gather(j, state, topology, &grad).viscosity(&cfg.saturation))
}

/// Acceleration of vehicle `j` under the bidirectional law.
pub fn accel_bidirectional(
    j: usize,
    state: &PlatoonState,
    ext: &ExtendedSpacings,
    topology: &Topology,
    cfg: &ControllerConfig,
) -> Result<f64> {
    let grad = Gradients::new(ext, &cfg.potential)?;
    Local::gather(j, state, topology, &grad).bidirectional(cfg)
}

/// Acceleration of vehicle `j` under the baseline law.
pub fn accel_baseline(
    j: usize,
    state: &PlatoonState,
    ext: &ExtendedSpacings,
    topology: &Topology,
    cfg: &ControllerConfig,
) -> Result<f64> {
    let ControlLaw::Baseline { mu_tilde, epsilon } = cfg.law else {
        return Err(ModelError::Unsupported(
            "baseline acceleration requested for a bidirectional configuration".into(),
        ));
    };
    let grad = Gradients::new(ext, &cfg.potential)?;
    Local::gather(j, state, topology, &grad).baseline(cfg, mu_tilde, epsilon)
}

/// Per-vehicle quantities of the active law for a whole platoon.
#[derive(Debug, Clone)]
pub struct ControlField {
    pub targets: Vec<f64>,
    pub viscosity: Vec<f64>,
    pub accel: Vec<f64>,
}

impl ControlField {
    /// Evaluates the active law for every vehicle. The state is assumed to lie in
    /// the state space; spacings at or below `L` or speeds outside `(0, v_max)`
    /// are reported as domain errors.
    pub fn evaluate(state: &PlatoonState, topology: &Topology, cfg: &ControllerConfig) -> Result<Self> {
        let ext = ExtendedSpacings::new(state, topology);
        let grad = Gradients::new(&ext, &cfg.potential)?;
        Self::from_gradients(state, topology, cfg, &grad)
    }

    pub fn from_gradients(
        state: &PlatoonState,
        topology: &Topology,
        cfg: &ControllerConfig,
        grad: &Gradients,
    ) -> Result<Self> {
        let n = state.n();
        let mut targets = Vec::with_capacity(n);
        let mut viscosity = Vec::with_capacity(n);
        let mut accel = Vec::with_capacity(n);
        for j in 0..n {
            let local = Local::gather(j, state, topology, grad);
            targets.push(local.target(&cfg.saturation));
            viscosity.push(local.viscosity(&cfg.saturation));
            accel.push(match cfg.law {
                ControlLaw::Bidirectional => local.bidirectional(cfg)?,
                ControlLaw::Baseline { mu_tilde, epsilon } => local.baseline(cfg, mu_tilde, epsilon)?,
            });
        }
        Ok(Self {
            targets,
            viscosity,
            accel,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(lambda: f64) -> ControllerConfig {
        ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(0.1, 5.0, lambda).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn beta_at_half_speed_is_four() {
        for vm in [1.0, 35.0, 120.0] {
            assert_relative_eq!(beta(vm / 2.0, vm / 2.0, vm).unwrap(), 4.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn beta_blows_up_at_speed_bounds() {
        assert!(beta(1e-9, 10.0, 35.0).unwrap() > 1e12);
        assert!(beta(35.0 - 1e-9, 10.0, 35.0).unwrap() > 1e12);
        assert!(beta(0.0, 10.0, 35.0).is_err());
        assert!(beta(35.0, 10.0, 35.0).is_err());
    }

    #[test]
    fn baseline_g_is_c1() {
        let eps = 0.1;
        assert_eq!(baseline_g(-eps, eps), 0.0);
        assert_eq!(baseline_g(-1.0, eps), 0.0);
        assert_relative_eq!(baseline_g(0.0, eps), eps / 2.0);
        let h = 1e-7;
        assert_relative_eq!(baseline_g(-h, eps), eps / 2.0, epsilon = 1e-7);
        let left = (baseline_g(0.0, eps) - baseline_g(-h, eps)) / h;
        let right = (baseline_g(h, eps) - baseline_g(0.0, eps)) / h;
        assert_relative_eq!(left, 1.0, epsilon = 1e-5);
        assert_relative_eq!(right, 1.0, epsilon = 1e-9);
        let left = (baseline_g(-eps + h, eps) - baseline_g(-eps, eps)) / h;
        assert!(left.abs() < 1e-5);
    }

    #[test]
    fn free_flow_targets_desired_speed() {
        let cfg = cfg(30.0);
        let ring = Topology::Ring { length: 130.0 };
        let state = PlatoonState::new(vec![31.0, 32.0, 33.0], vec![30.0; 4]).unwrap();
        let ext = ExtendedSpacings::new(&state, &ring);
        for j in 0..4 {
            assert_eq!(target_speed(j, &ext, &cfg).unwrap(), 30.0);
            assert_eq!(viscosity(j, &state, &ext, &ring, &cfg).unwrap(), 0.0);
            assert_eq!(accel_bidirectional(j, &state, &ext, &ring, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn uniform_ring_is_an_equilibrium() {
        let cfg = cfg(40.0);
        let ring = Topology::Ring { length: 130.0 };
        let state = PlatoonState::uniform(4, 32.5, 30.0);
        let field = ControlField::evaluate(&state, &ring, &cfg).unwrap();
        for j in 0..4 {
            assert!((field.targets[j] - 30.0).abs() < 1e-12);
            assert!(field.accel[j].abs() < 1e-12);
        }
    }

    #[test]
    fn open_road_tail_target_uses_only_gap_ahead() {
        let cfg = cfg(40.0);
        let state = PlatoonState::new(vec![20.0, 25.0], vec![30.0; 3]).unwrap();
        let ext = ExtendedSpacings::new(&state, &Topology::Open);
        let f = target_speed(2, &ext, &cfg).unwrap();
        let expected = 30.0 - cfg.saturation.value(-cfg.potential.d1(25.0).unwrap());
        assert_relative_eq!(f, expected, max_relative = 1e-12);
        assert!(f < 30.0);
    }

    #[test]
    fn equal_speeds_have_no_viscosity() {
        let cfg = cfg(40.0);
        let ring = Topology::Ring { length: 130.0 };
        let state = PlatoonState::new(vec![20.0, 38.0, 27.0], vec![25.0; 4]).unwrap();
        let ext = ExtendedSpacings::new(&state, &ring);
        for j in 0..4 {
            assert_eq!(viscosity(j, &state, &ext, &ring, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn baseline_vanishes_at_free_flow_equilibrium() {
        let cfg = cfg(35.0).with_law(ControlLaw::Baseline {
            mu_tilde: 0.1,
            epsilon: 0.1,
        });
        let state = PlatoonState::new(vec![40.0, 36.0], vec![30.0; 3]).unwrap();
        let ext = ExtendedSpacings::new(&state, &Topology::Open);
        for j in 0..3 {
            assert_eq!(accel_baseline(j, &state, &ext, &Topology::Open, &cfg).unwrap(), 0.0);
        }
        assert!(accel_baseline(0, &state, &ext, &Topology::Open, &self::cfg(35.0)).is_err());
    }

    #[test]
    fn vectorized_field_matches_per_vehicle_calls() {
        let cfg = cfg(40.0);
        let ring = Topology::Ring { length: 130.0 };
        let state = PlatoonState::new(vec![33.0, 32.0, 27.0], vec![31.0, 28.0, 27.0, 30.0]).unwrap();
        let ext = ExtendedSpacings::new(&state, &ring);
        let field = ControlField::evaluate(&state, &ring, &cfg).unwrap();
        for j in 0..4 {
            assert_eq!(
                field.accel[j],
                accel_bidirectional(j, &state, &ext, &ring, &cfg).unwrap()
            );
            assert_eq!(field.targets[j], target_speed(j, &ext, &cfg).unwrap());
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(40.0);
        c.mu = 0.0;
        assert!(c.validate().is_err());
        let c = cfg(40.0).with_law(ControlLaw::Baseline {
            mu_tilde: 0.1,
            epsilon: 0.0,
        });
        assert!(c.validate().is_err());
    }
}
