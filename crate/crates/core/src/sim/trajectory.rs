//! Closed-loop integration of a platoon and the sampled trajectory.

use crate::analysis::{has_unique_equilibrium, lyapunov_h, LyapunovSample};
use crate::error::Result;
use crate::model::{
    dynamics_rhs, ControlField, ControlLaw, ControllerConfig, DisturbanceSchedule, ExtendedSpacings, PlatoonState,
    Topology,
};
use crate::sim::integrator::{solve, IntegratorSettings, OdeSystem, StepStats, Termination};

/// Everything needed to integrate one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub topology: Topology,
    pub controller: ControllerConfig,
    pub initial: PlatoonState,
    pub disturbance: Option<DisturbanceSchedule>,
    pub settings: IntegratorSettings,
}

impl Problem {
    pub fn new(topology: Topology, controller: ControllerConfig, initial: PlatoonState) -> Self {
        Self {
            topology,
            controller,
            initial,
            disturbance: None,
            settings: IntegratorSettings::default(),
        }
    }

    pub fn with_settings(mut self, settings: IntegratorSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn with_disturbance(mut self, schedule: DisturbanceSchedule) -> Self {
        self.disturbance = Some(schedule);
        self
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    pub fn validate(&self) -> Result<()> {
        self.controller.validate()?;
        self.topology.validate(self.n(), &self.controller.potential)?;
        self.settings.validate()?;
        if let Some(d) = &self.disturbance {
            d.validate(&self.controller.saturation)?;
        }
        self.initial
            .validate(&self.topology, &self.controller.potential, &self.controller.saturation)
    }

    /// Whether `H` must be nonincreasing along the exact solution.
    pub fn lyapunov_monotone(&self) -> bool {
        self.controller.law == ControlLaw::Bidirectional && self.disturbance.is_none()
    }

    /// State as seen by the controllers at time `t`: the leader's stored speed
    /// is replaced by the prescribed signal when a disturbance is active.
    pub fn observed_state(&self, t: f64, y: &[f64]) -> Result<PlatoonState> {
        let mut state = PlatoonState::from_vector(y)?;
        if let Some(d) = &self.disturbance {
            state.speeds[0] = d.speed(t, self.controller.v_star());
        }
        Ok(state)
    }
}

struct PlatoonSystem<'a> {
    problem: &'a Problem,
}

impl OdeSystem for PlatoonSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.problem.n() - 1
    }

    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> std::result::Result<(), String> {
        let p = self.problem;
        let state = PlatoonState::from_vector(y).map_err(|e| e.to_string())?;
        let d =
            dynamics_rhs(&state, &p.topology, &p.controller, t, p.disturbance.as_ref()).map_err(|e| e.to_string())?;
        let m = d.spacings.len();
        out[..m].copy_from_slice(&d.spacings);
        out[m..].copy_from_slice(&d.speeds);
        Ok(())
    }

    fn admissible(&self, y: &[f64]) -> bool {
        let p = self.problem;
        PlatoonState::from_vector(y)
            .and_then(|s| s.validate(&p.topology, &p.controller.potential, &p.controller.saturation))
            .is_ok()
    }

    fn guard(&self, _t: f64, y: &[f64]) -> Option<f64> {
        let p = self.problem;
        if !p.lyapunov_monotone() {
            return None;
        }
        let state = PlatoonState::from_vector(y).ok()?;
        lyapunov_h(&state, &p.topology, &p.controller).ok()
    }
}

/// One row of the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: PlatoonState,
    /// Accelerations `F_1..F_n`; the leader's entry is the signal's
    /// derivative when a disturbance prescribes it.
    pub accel: Vec<f64>,
    pub h: f64,
    pub u: Option<f64>,
    pub hdot: Option<f64>,
    /// Smallest gap, the ring's closing gap included.
    pub min_spacing: f64,
    pub max_abs_accel: f64,
}

impl Sample {
    pub fn evaluate(problem: &Problem, t: f64, y: &[f64]) -> Result<Self> {
        let state = problem.observed_state(t, y)?;
        let cfg = &problem.controller;
        state.validate(&problem.topology, &cfg.potential, &cfg.saturation)?;
        let field = ControlField::evaluate(&state, &problem.topology, cfg)?;
        let mut accel = field.accel;
        if let Some(d) = &problem.disturbance {
            accel[0] = d.acceleration(t);
        }
        let lyap = LyapunovSample::evaluate(&state, &problem.topology, cfg)?;
        let ext = ExtendedSpacings::new(&state, &problem.topology);
        let min_spacing = ext.gaps().iter().copied().fold(f64::INFINITY, f64::min);
        let max_abs_accel = accel.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        Ok(Self {
            t,
            state,
            accel,
            h: lyap.h,
            u: lyap.u,
            hdot: lyap.hdot,
            min_spacing,
            max_abs_accel,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub settings: IntegratorSettings,
    pub stats: StepStats,
    /// Last accepted time and state of the integrator, independent of the grid.
    pub final_time: f64,
    pub final_state: PlatoonState,
    /// Largest `|F_i|` at the end of any accepted step, so that short peaks
    /// between grid points are not missed.
    pub step_peak_accel: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    /// `(t, U)` pairs, when `U` is defined.
    pub fn u_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().filter_map(|s| s.u.map(|u| (s.t, u))).collect()
    }

    pub fn h_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.h)).collect()
    }

    /// Largest `|F_i|` over all samples and accepted steps.
    pub fn max_abs_accel(&self) -> f64 {
        self.samples
            .iter()
            .fold(self.step_peak_accel, |m, s| m.max(s.max_abs_accel))
    }
}

/// Integrates the closed loop and records diagnostics on the output grid.
///
/// Invalid problems are errors. Failures during the run are reported through
/// [`Trajectory::termination`] with the samples gathered so far.
pub fn integrate(problem: &Problem) -> Result<Trajectory> {
    problem.validate()?;
    let settings = problem.settings;
    let times = settings.sample_times();
    let y0 = problem.initial.to_vector();
    let mut samples = vec![Sample::evaluate(problem, 0.0, &y0)?];
    let mut next = 1;
    let mut step_peak_accel: f64 = 0.0;
    let system = PlatoonSystem { problem };
    let outcome = solve(&system, 0.0, &y0, &settings, |step| {
        let state = problem.observed_state(step.t1, step.y1()).map_err(|e| e.to_string())?;
        let field =
            ControlField::evaluate(&state, &problem.topology, &problem.controller).map_err(|e| e.to_string())?;
        let skip = usize::from(problem.disturbance.is_some());
        for a in &field.accel[skip..] {
            step_peak_accel = step_peak_accel.max(a.abs());
        }
        if let Some(d) = &problem.disturbance {
            step_peak_accel = step_peak_accel.max(d.acceleration(step.t1).abs());
        }
        while next < times.len() && times[next] <= step.t1 {
            let t = times[next];
            let y = step.eval(t);
            let sample = Sample::evaluate(problem, t, &y).map_err(|e| format!("sample at t = {t}: {e}"))?;
            samples.push(sample);
            next += 1;
        }
        Ok(())
    })?;
    let final_state = problem.observed_state(outcome.t, &outcome.y)?;
    Ok(Trajectory {
        samples,
        termination: outcome.termination,
        settings,
        stats: outcome.stats,
        final_time: outcome.t,
        final_state,
        step_peak_accel,
    })
}

/// Whether `U` columns exist for this problem.
pub fn has_u(problem: &Problem) -> bool {
    has_unique_equilibrium(&problem.topology, problem.n(), &problem.controller)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialSpec, SaturationSpec};

    fn cfg(lambda: f64) -> ControllerConfig {
        ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(0.1, 5.0, lambda).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
        .unwrap()
    }

    fn short(problem: Problem, t_end: f64) -> Problem {
        let settings = IntegratorSettings {
            t_end,
            ..problem.settings
        };
        problem.with_settings(settings)
    }

    #[test]
    fn equilibrium_stays_put() {
        let ring = Topology::Ring { length: 130.0 };
        let p = short(
            Problem::new(ring, cfg(40.0), PlatoonState::uniform(4, 32.5, 30.0)),
            100.0,
        );
        let traj = integrate(&p).unwrap();
        assert!(traj.termination.is_completed());
        assert_eq!(traj.samples.len(), 1001);
        let drift = traj
            .final_state
            .to_vector()
            .iter()
            .zip(p.initial.to_vector())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift <= 1e-9);
    }

    #[test]
    fn ring_run_is_deterministic_and_decreasing() {
        let ring = Topology::Ring { length: 130.0 };
        let init = PlatoonState::new(vec![33.0, 32.0, 27.0], vec![31.0, 28.0, 27.0, 30.0]).unwrap();
        let p = short(Problem::new(ring, cfg(40.0), init), 20.0);
        let a = integrate(&p).unwrap();
        let b = integrate(&p).unwrap();
        assert_eq!(a.samples, b.samples);
        assert!(a.samples.windows(2).all(|w| w[1].h <= w[0].h + 1e-8));
        assert!(a.samples.iter().all(|s| s.u.is_some() && s.hdot.unwrap() <= 0.0));
    }

    #[test]
    fn disturbed_leader_follows_signal() {
        let ring = Topology::Ring { length: 130.0 };
        let c = ControllerConfig::bidirectional(
            0.1,
            PotentialSpec::new(0.1, 5.0, 40.0).unwrap(),
            SaturationSpec::new(20.0, 35.0).unwrap(),
        )
        .unwrap();
        let schedule = DisturbanceSchedule::new(14.0, &c.saturation).unwrap();
        let p = short(
            Problem::new(ring, c, PlatoonState::uniform(6, 130.0 / 6.0, 20.0)).with_disturbance(schedule),
            10.0,
        );
        let traj = integrate(&p).unwrap();
        assert!(traj.termination.is_completed(), "{}", traj.termination);
        for s in &traj.samples {
            assert_eq!(s.state.speeds[0], schedule.speed(s.t, 20.0));
        }
        assert!(!p.lyapunov_monotone());
    }

    #[test]
    fn rejects_invalid_initial_state() {
        let ring = Topology::Ring { length: 130.0 };
        let p = Problem::new(ring, cfg(40.0), PlatoonState::uniform(4, 42.0, 30.0));
        assert!(integrate(&p).is_err());
    }
}
