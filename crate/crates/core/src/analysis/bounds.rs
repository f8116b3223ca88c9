//! A-priori bounds: ring level sets, the open-road spacing ceiling and the
//! large-gap exponential regime.

use crate::analysis::lyapunov_h;
use crate::error::{ModelError, Result};
use crate::model::{ControllerConfig, ExtendedSpacings, PlatoonState, Topology};

/// Bounds that hold on the sublevel set `{H <= r}` of a ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetBounds {
    pub r: f64,
    /// Every gap, including the closing gap, is at least `c`.
    pub c: f64,
    pub v_lower: f64,
    pub v_upper: f64,
}

impl LevelSetBounds {
    /// Whether a state satisfies the spacing and speed bounds.
    pub fn contains(&self, state: &PlatoonState, topology: &Topology) -> bool {
        let ext = ExtendedSpacings::new(state, topology);
        ext.gaps().iter().all(|&s| s >= self.c) && state.speeds.iter().all(|&v| v >= self.v_lower && v <= self.v_upper)
    }
}

/// Spacing floor `c` with `V(c) = r` and speed bounds `v_lower <= v_i <= v_upper`
/// valid for every ring state with `H <= r`.
///
/// Every gap `s` satisfies `V'(c) <= V'(s) <= 0`, so the target speeds lie in
/// `[v* - b(-V'(c)), v* - b(V'(c))]`; the kinetic term then confines each
/// speed between the two roots of `(v - f)² = (2r / v_max²) v (v_max - v)`.
pub fn level_set_bounds(r: f64, cfg: &ControllerConfig) -> Result<LevelSetBounds> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "level must be positive and finite, got {r}"
        )));
    }
    let c = cfg.potential.inverse(r)?;
    let slope = cfg.potential.d1(c)?;
    let vm = cfg.v_max();
    let vm2 = vm * vm;
    let f_low = cfg.saturation.complement(-slope);
    let f_high = cfg.saturation.complement(slope);

    let v_lower = vm * f_low * f_low / (vm2 + r + (r * r + 2.0 * r * vm2).sqrt());
    let v_upper = vm * (vm * f_high + r + (r * r + 2.0 * r * f_high * (vm - f_high)).sqrt()) / (vm2 + 2.0 * r);
    Ok(LevelSetBounds { r, c, v_lower, v_upper })
}

/// Per-gap upper bound on `s_i(t)` for all `t >= 0` on an open road:
/// `max(s_i(0), λ) + v_max √(2 H_S(0)) / (2 μ min(v*, v_max - v*))`.
pub fn spacing_ceiling(initial: &PlatoonState, cfg: &ControllerConfig) -> Result<Vec<f64>> {
    let h = lyapunov_h(initial, &Topology::Open, cfg)?;
    let vs = cfg.v_star();
    let vm = cfg.v_max();
    let slack = vm * (2.0 * h).sqrt() / (2.0 * cfg.mu * vs.min(vm - vs));
    let lambda = cfg.potential.interaction_distance;
    Ok(initial.spacings.iter().map(|&s| s.max(lambda) + slack).collect())
}

/// Open-road regime with exponential speed convergence: when every initial
/// gap exceeds `λ + (v_max/μ) Γ`, speeds approach `v*` within
/// `(v_max/2) Γ e^{-μt}` and no gap ever drops below `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialRegime {
    pub premise_holds: bool,
    pub gamma: f64,
    /// Smallest initial gap that satisfies the premise.
    pub required_spacing: f64,
    pub spacing_floor: f64,
    half_v_max: f64,
    mu: f64,
}

impl ExponentialRegime {
    pub fn check(initial: &PlatoonState, cfg: &ControllerConfig) -> Result<Self> {
        initial.validate(&Topology::Open, &cfg.potential, &cfg.saturation)?;
        let ext = ExtendedSpacings::new(initial, &Topology::Open);
        let vm = cfg.v_max();
        let mut gamma: f64 = 0.0;
        for (j, &v) in initial.speeds.iter().enumerate() {
            let f = crate::model::target_speed(j, &ext, cfg)?;
            gamma = gamma.max((v - f).abs() / ((vm - v) * v).sqrt());
        }
        let lambda = cfg.potential.interaction_distance;
        let required_spacing = lambda + vm / cfg.mu * gamma;
        let min_gap = initial.spacings.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            premise_holds: min_gap >= required_spacing,
            gamma,
            required_spacing,
            spacing_floor: lambda,
            half_v_max: 0.5 * vm,
            mu: cfg.mu,
        })
    }

    /// Bound on `max_i |v_i(t) - v*|`.
    pub fn speed_envelope(&self, t: f64) -> f64 {
        self.half_v_max * self.gamma * (-self.mu * t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialSpec, SaturationSpec};

    fn ring_cfg() -> ControllerConfig {
        ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(0.1, 5.0, 40.0).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
        .unwrap()
    }

    fn open_cfg() -> ControllerConfig {
        ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(35f64.powi(-3), 5.0, 35.0).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn level_set_bounds_are_ordered_and_monotone() {
        let cfg = ring_cfg();
        let mut prev: Option<LevelSetBounds> = None;
        // At r -> 0 the lower bound tends to f²/v_max rather than v*: it is
        // sound but not tight.
        let tiny = level_set_bounds(1e-12, &cfg).unwrap();
        assert!((tiny.v_lower - 900.0 / 35.0).abs() < 1e-3 && (tiny.v_upper - 30.0).abs() < 1e-3);
        for r in [1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0, 1e4] {
            let b = level_set_bounds(r, &cfg).unwrap();
            assert!(b.c > 5.0 && b.c < 40.0);
            // v_upper rounds to v_max once r dwarfs v_max².
            assert!(0.0 <= b.v_lower && b.v_lower < 30.0 && 30.0 < b.v_upper && b.v_upper <= 35.0);
            if let Some(p) = prev {
                assert!(b.c <= p.c && b.v_upper >= p.v_upper && b.v_lower <= p.v_lower);
            }
            prev = Some(b);
        }
        assert!(level_set_bounds(0.0, &cfg).is_err());
        assert!(level_set_bounds(1e12, &cfg).unwrap().c - 5.0 < 0.1);
    }

    #[test]
    fn ceiling_is_exact_on_equilibria() {
        let cfg = open_cfg();
        let state = PlatoonState::new(vec![35.0, 50.0, 36.0], vec![30.0; 4]).unwrap();
        assert_eq!(spacing_ceiling(&state, &cfg).unwrap(), vec![35.0, 50.0, 36.0]);
    }

    #[test]
    fn regime_at_rest_on_the_set() {
        let cfg = open_cfg();
        let state = PlatoonState::new(vec![35.0, 50.0], vec![30.0; 3]).unwrap();
        let regime = ExponentialRegime::check(&state, &cfg).unwrap();
        assert!(regime.premise_holds);
        assert_eq!(regime.gamma, 0.0);
        assert_eq!(regime.speed_envelope(0.0), 0.0);
    }

    #[test]
    fn regime_premise_fails_for_tight_gaps() {
        let cfg = open_cfg();
        let state = PlatoonState::new(vec![19.0; 4], vec![20.0; 5]).unwrap();
        let regime = ExponentialRegime::check(&state, &cfg).unwrap();
        assert!(!regime.premise_holds);
        assert!(regime.gamma > 0.0);
    }
}
