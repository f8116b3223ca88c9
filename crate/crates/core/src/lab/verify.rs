//! Verification mode: a run plus the scenario's pass thresholds.

use std::fmt::Write as _;
use std::path::Path;

use crate::lab::{preset, run_scenario, simulate, LabError, LabResult, Run, Scenario};
use crate::sim::convergence_time;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    /// Human-readable requirement, e.g. `<= 1e-3`.
    pub requirement: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            requirement: format!("<= {limit:e}"),
            passed: observed <= limit,
        }
    }

    fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            requirement: format!(">= {limit:e}"),
            passed: observed >= limit,
        }
    }

    fn below(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            requirement: format!("< {limit:e}"),
            passed: observed < limit,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            observed: if ok { 1.0 } else { 0.0 },
            requirement: "holds".into(),
            passed: ok,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub run: Run,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>14}  {:<24}  result",
            "check", "observed", "requirement"
        );
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<width$}  {:>14.6e}  {:<24}  {}",
                c.name,
                c.observed,
                c.requirement,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            s,
            "{}: {} of {} checks passed",
            self.run.scenario.name,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        );
        s
    }
}

/// Runs the scenario and evaluates every threshold it sets. A run that
/// stops before `t_end` is an [`LabError::Integration`] error.
pub fn verify(scenario: &Scenario, out_dir: Option<&Path>) -> LabResult<Verification> {
    let run = simulate(scenario, out_dir)?;
    if !run.trajectory.termination.is_completed() {
        return Err(LabError::Integration(run.trajectory.termination.to_string()));
    }
    let th = &scenario.thresholds;
    let r = &run.report;
    let mut checks = Vec::new();

    if th.monitors {
        for m in &r.monitors.results {
            checks.push(Check {
                name: format!("monitor {}", m.kind.name()),
                observed: m.worst_margin,
                requirement: "no violation".into(),
                passed: m.passed(),
            });
        }
    }
    if let Some(tol) = th.speed_tol {
        checks.push(Check::at_most("final max |v - v*|", r.final_speed_deviation, tol));
    }
    if let (Some(target), Some(tol)) = (th.spacing_target, th.spacing_tol) {
        let dev = r.final_gaps.iter().fold(0.0f64, |m, s| m.max((s - target).abs()));
        checks.push(Check::at_most(format!("final max |s - {target}|"), dev, tol));
    }
    if let Some(limit) = th.min_final_spacing {
        let min = r.final_gaps.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least("final min gap", min, limit));
    }
    if let Some(limit) = th.max_final_lyapunov {
        checks.push(Check::at_most("final H", r.final_h, limit));
    }
    let (fit_name, fit) = match r.u_fit {
        Some(f) => ("ln U", Some(f)),
        None if r.final_u.is_some() => ("ln U", None),
        None => ("ln H", r.h_fit),
    };
    if let Some(limit) = th.max_decay_slope {
        let slope = fit.map_or(f64::NAN, |f| f.slope);
        checks.push(Check::at_most(format!("{fit_name} tail slope"), slope, limit));
    }
    if let Some(limit) = th.min_r_squared {
        let r2 = fit.map_or(f64::NAN, |f| f.r_squared);
        checks.push(Check::at_least(format!("{fit_name} fit R^2"), r2, limit));
    }
    if let Some(limit) = th.convergence_time {
        let t = convergence_time(&run.distance, th.convergence_tol).unwrap_or(f64::INFINITY);
        checks.push(Check::at_most(
            format!("time to stay within {:e} of equilibrium", th.convergence_tol),
            t,
            limit,
        ));
    }
    if th.string_attenuation {
        if let Some(a) = &r.string_attenuation {
            let worst = a.window_peaks.iter().skip(1).copied().fold(0.0f64, f64::max);
            checks.push(Check::below("follower peak |v - v*|", worst, a.amplitude));
            checks.push(Check::holds(
                "deceleration peaks nonincreasing",
                a.deceleration_chain.windows(2).all(|w| w[1].1 <= w[0].1),
            ));
            checks.push(Check::holds(
                "acceleration peaks nonincreasing",
                a.acceleration_chain.windows(2).all(|w| w[1].1 <= w[0].1),
            ));
        }
    }
    if let Some(name) = &th.max_accel_below_preset {
        let mut reference = preset(name)?;
        reference.integrator = scenario.integrator;
        let other = run_scenario(&reference)?;
        if !other.trajectory.termination.is_completed() {
            return Err(LabError::Integration(format!(
                "reference {name}: {}",
                other.trajectory.termination
            )));
        }
        checks.push(Check::below(
            format!("max |F| vs {name}"),
            r.max_abs_accel,
            other.report.max_abs_accel,
        ));
    }
    Ok(Verification { run, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_ring_point() -> Scenario {
        let mut sc = preset("ring-point").unwrap();
        sc.integrator.t_end = 120.0;
        sc
    }

    #[test]
    fn impossible_convergence_time_fails() {
        let mut sc = short_ring_point();
        sc.thresholds.convergence_time = Some(0.0);
        let v = verify(&sc, None).unwrap();
        assert!(!v.passed());
        let c = v.checks.iter().find(|c| c.name.starts_with("time to stay")).unwrap();
        assert!(!c.passed && c.observed > 0.0);
    }

    #[test]
    fn reports_are_idempotent() {
        let sc = short_ring_point();
        let a = verify(&sc, None).unwrap();
        let b = verify(&sc, None).unwrap();
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.table(), b.table());
        assert_eq!(a.run.report.summary(), b.run.report.summary());
    }

    #[test]
    fn early_stop_is_an_integration_error() {
        let mut sc = short_ring_point();
        sc.integrator.dt_min = 1.0;
        sc.integrator.dt_init = 2.0;
        sc.integrator.dt_max = 2.0;
        sc.integrator.rtol = 1e-14;
        sc.integrator.atol = 1e-14;
        let err = verify(&sc, None).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
