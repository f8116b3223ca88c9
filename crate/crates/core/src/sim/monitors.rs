//! Invariant monitors over a finished trajectory.

use serde::{Deserialize, Serialize};

use crate::analysis::{spacing_ceiling, ExponentialRegime};
use crate::model::{ControlLaw, ExtendedSpacings, Topology};
use crate::sim::{Problem, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonitorKind {
    /// Every gap stays above the safety distance.
    Spacing,
    /// Every speed stays in `(0, v_max)`.
    Speed,
    /// `H` nonincreasing between consecutive samples.
    LyapunovMonotone,
    /// Open-road per-gap ceiling from the initial `H`.
    SpacingCeiling,
    /// Speed envelope `(v_max/2) Γ e^{-μt}` in the large-gap regime.
    SpeedEnvelope,
    /// No gap below `λ` in the large-gap regime.
    SpacingFloor,
    /// Gaps on a ring add up to its length.
    RingLength,
}

impl MonitorKind {
    pub fn name(&self) -> &'static str {
        match self {
            MonitorKind::Spacing => "spacing",
            MonitorKind::Speed => "speed",
            MonitorKind::LyapunovMonotone => "lyapunov-monotone",
            MonitorKind::SpacingCeiling => "spacing-ceiling",
            MonitorKind::SpeedEnvelope => "speed-envelope",
            MonitorKind::SpacingFloor => "spacing-floor",
            MonitorKind::RingLength => "ring-length",
        }
    }
}

/// Which monitors may run. Monitors that do not apply to a problem are
/// skipped regardless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorToggles {
    pub spacing: bool,
    pub speed: bool,
    pub lyapunov_monotone: bool,
    pub spacing_ceiling: bool,
    pub exponential_regime: bool,
    pub ring_length: bool,
}

impl Default for MonitorToggles {
    fn default() -> Self {
        Self {
            spacing: true,
            speed: true,
            lyapunov_monotone: true,
            spacing_ceiling: true,
            exponential_regime: true,
            ring_length: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorResult {
    pub kind: MonitorKind,
    /// Smallest slack over all samples; negative means violated.
    pub worst_margin: f64,
    pub first_violation: Option<f64>,
}

impl MonitorResult {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonitorReport {
    pub results: Vec<MonitorResult>,
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(MonitorResult::passed)
    }

    pub fn get(&self, kind: MonitorKind) -> Option<&MonitorResult> {
        self.results.iter().find(|r| r.kind == kind)
    }

    pub fn failures(&self) -> impl Iterator<Item = &MonitorResult> {
        self.results.iter().filter(|r| !r.passed())
    }
}

/// Margins are recorded as-is; a sample violates when its margin is below
/// `-tolerance` (or not above zero for the open-set monitors).
struct Tracker {
    kind: MonitorKind,
    worst: f64,
    first: Option<f64>,
}

impl Tracker {
    fn new(kind: MonitorKind) -> Self {
        Self {
            kind,
            worst: f64::INFINITY,
            first: None,
        }
    }

    fn record(&mut self, t: f64, margin: f64, violated: bool) {
        self.worst = self.worst.min(margin);
        if (violated || margin.is_nan()) && self.first.is_none() {
            self.first = Some(t);
        }
    }

    fn finish(self) -> MonitorResult {
        MonitorResult {
            kind: self.kind,
            worst_margin: self.worst,
            first_violation: self.first,
        }
    }
}

/// Tolerance of the regime monitors, absorbing integration error.
const REGIME_TOL: f64 = 1e-9;
const RING_LENGTH_TOL: f64 = 1e-8;

pub fn run_monitors(trajectory: &Trajectory, problem: &Problem, toggles: &MonitorToggles) -> MonitorReport {
    let cfg = &problem.controller;
    let topo = &problem.topology;
    let lambda = cfg.potential.interaction_distance;
    let safety = cfg.potential.safety_distance;
    let v_max = cfg.v_max();
    let v_star = cfg.v_star();
    let open_bidirectional = !topo.is_ring() && cfg.law == ControlLaw::Bidirectional && problem.disturbance.is_none();

    let mut results = Vec::new();
    let samples = &trajectory.samples;

    if toggles.spacing {
        let mut m = Tracker::new(MonitorKind::Spacing);
        for s in samples {
            let margin = s.min_spacing - safety;
            m.record(s.t, margin, !(margin > 0.0));
        }
        results.push(m.finish());
    }

    if toggles.speed {
        let mut m = Tracker::new(MonitorKind::Speed);
        for s in samples {
            let margin = s
                .state
                .speeds
                .iter()
                .fold(f64::INFINITY, |acc, &v| acc.min(v).min(v_max - v));
            m.record(s.t, margin, !(margin > 0.0));
        }
        results.push(m.finish());
    }

    if toggles.lyapunov_monotone && problem.lyapunov_monotone() {
        let mut m = Tracker::new(MonitorKind::LyapunovMonotone);
        let rtol = trajectory.settings.rtol;
        for w in samples.windows(2) {
            let tol = (10.0 * rtol * w[0].h).max(1e-8);
            let margin = tol - (w[1].h - w[0].h);
            m.record(w[1].t, margin, margin < 0.0);
        }
        results.push(m.finish());
    }

    if toggles.spacing_ceiling && open_bidirectional {
        if let Ok(ceiling) = spacing_ceiling(&problem.initial, cfg) {
            let mut m = Tracker::new(MonitorKind::SpacingCeiling);
            for s in samples {
                let margin = s
                    .state
                    .spacings
                    .iter()
                    .zip(&ceiling)
                    .fold(f64::INFINITY, |acc, (x, c)| acc.min(c - x));
                m.record(s.t, margin, margin < 0.0);
            }
            results.push(m.finish());
        }
    }

    if toggles.exponential_regime && open_bidirectional {
        if let Ok(regime) = ExponentialRegime::check(&problem.initial, cfg) {
            if regime.premise_holds {
                let mut env = Tracker::new(MonitorKind::SpeedEnvelope);
                let mut floor = Tracker::new(MonitorKind::SpacingFloor);
                for s in samples {
                    let dev = s.state.speeds.iter().fold(0.0f64, |acc, v| acc.max((v - v_star).abs()));
                    let margin = regime.speed_envelope(s.t) - dev;
                    env.record(s.t, margin, margin < -REGIME_TOL);
                    let margin = s.min_spacing - lambda;
                    floor.record(s.t, margin, margin < -REGIME_TOL);
                }
                results.push(env.finish());
                results.push(floor.finish());
            }
        }
    }

    if toggles.ring_length {
        if let Topology::Ring { length } = *topo {
            let mut m = Tracker::new(MonitorKind::RingLength);
            for s in samples {
                let ext = ExtendedSpacings::new(&s.state, topo);
                let total: f64 = ext.gaps().iter().sum();
                let margin = RING_LENGTH_TOL - (total - length).abs();
                m.record(s.t, margin, margin < 0.0);
            }
            results.push(m.finish());
        }
    }

    MonitorReport { results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ControllerConfig, PlatoonState, PotentialSpec, SaturationSpec};
    use crate::sim::{integrate, IntegratorSettings};

    fn open_problem(spacing: f64, speed: f64) -> Problem {
        let cfg = ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(35f64.powi(-3), 5.0, 35.0).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
        .unwrap();
        let settings = IntegratorSettings {
            t_end: 30.0,
            ..IntegratorSettings::default()
        };
        Problem::new(Topology::Open, cfg, PlatoonState::uniform(5, spacing, speed)).with_settings(settings)
    }

    #[test]
    fn open_road_run_passes_every_monitor() {
        let p = open_problem(19.0, 20.0);
        let traj = integrate(&p).unwrap();
        let report = run_monitors(&traj, &p, &MonitorToggles::default());
        assert!(report.passed(), "{report:?}");
        assert!(report.get(MonitorKind::SpacingCeiling).is_some());
        assert!(report.get(MonitorKind::SpeedEnvelope).is_none());
        assert!(report.get(MonitorKind::RingLength).is_none());
    }

    #[test]
    fn speed_at_limit_is_flagged() {
        let p = open_problem(19.0, 20.0);
        let mut traj = integrate(&p).unwrap();
        traj.samples[7].state.speeds[2] = 35.0;
        let report = run_monitors(&traj, &p, &MonitorToggles::default());
        let speed = report.get(MonitorKind::Speed).unwrap();
        assert_eq!(speed.first_violation, Some(traj.samples[7].t));
        assert!(!report.passed());
    }

    #[test]
    fn regime_monitors_engage_when_premise_holds() {
        let p = open_problem(80.0, 29.0);
        let traj = integrate(&p).unwrap();
        let report = run_monitors(&traj, &p, &MonitorToggles::default());
        let env = report.get(MonitorKind::SpeedEnvelope).unwrap();
        assert!(env.passed() && env.worst_margin >= 0.0);
        assert!(report.get(MonitorKind::SpacingFloor).unwrap().passed());
    }

    #[test]
    fn toggles_disable_monitors() {
        let p = open_problem(19.0, 20.0);
        let traj = integrate(&p).unwrap();
        let toggles = MonitorToggles {
            spacing_ceiling: false,
            lyapunov_monotone: false,
            ..MonitorToggles::default()
        };
        let report = run_monitors(&traj, &p, &toggles);
        assert_eq!(report.results.len(), 2);
    }
}
