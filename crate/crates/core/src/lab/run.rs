//! One scenario run: integrate, monitor, summarize, and optionally emit files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{dist_to_equilibrium, EquilibriumSet};
use crate::lab::output::{spacing_names, spacing_values, write_table, write_trajectory_csv};
use crate::lab::svg::{LineChart, Series};
use crate::lab::{LabError, LabResult, Scenario};
use crate::model::{ControlLaw, ExtendedSpacings, PlatoonState};
use crate::sim::{
    above_floor, fit_decay_rate, has_u, integrate, run_monitors, DecayFit, MonitorReport, Problem, StringAttenuation,
    Termination, Trajectory,
};

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub scenario_hash: String,
    pub termination: Termination,
    pub final_time: f64,
    pub final_state: PlatoonState,
    /// All `n` gaps at the end, ring closing gap included.
    pub final_gaps: Vec<f64>,
    pub final_h: f64,
    pub final_u: Option<f64>,
    pub final_speed_deviation: f64,
    pub dist_to_equilibrium: f64,
    pub h_fit: Option<DecayFit>,
    pub u_fit: Option<DecayFit>,
    pub max_abs_accel: f64,
    pub monitors: MonitorReport,
    pub string_attenuation: Option<StringAttenuation>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub scenario: Scenario,
    pub problem: Problem,
    pub trajectory: Trajectory,
    /// `(t, distance to the equilibrium set)` on the output grid.
    pub distance: Vec<(f64, f64)>,
    pub report: RunReport,
}

fn fit(series: &[(f64, f64)], scenario: &Scenario) -> Option<DecayFit> {
    let th = &scenario.thresholds;
    fit_decay_rate(above_floor(series, th.decay_floor), th.decay_tail_fraction).ok()
}

/// Integrates and analyses a scenario without touching the filesystem.
pub fn run_scenario(scenario: &Scenario) -> LabResult<Run> {
    scenario.validate()?;
    let problem = scenario.problem();
    let trajectory = integrate(&problem)?;
    let monitors = run_monitors(&trajectory, &problem, &scenario.monitors);
    let eq = EquilibriumSet::for_config(&problem.topology, problem.n(), &problem.controller);
    let distance = trajectory
        .samples
        .iter()
        .map(|s| Ok((s.t, dist_to_equilibrium(&s.state, &eq)?)))
        .collect::<crate::error::Result<Vec<_>>>()?;

    let last = trajectory.last();
    let v_star = problem.controller.v_star();
    let string_attenuation = match problem.disturbance {
        Some(_) => Some(StringAttenuation::measure(&trajectory, &problem)?),
        None => None,
    };
    let report = RunReport {
        scenario: scenario.name.clone(),
        scenario_hash: scenario.hash()?,
        termination: trajectory.termination.clone(),
        final_time: last.t,
        final_state: last.state.clone(),
        final_gaps: ExtendedSpacings::new(&last.state, &problem.topology).gaps().to_vec(),
        final_h: last.h,
        final_u: last.u,
        final_speed_deviation: last.state.speeds.iter().fold(0.0f64, |m, v| m.max((v - v_star).abs())),
        dist_to_equilibrium: distance.last().map_or(f64::NAN, |d| d.1),
        h_fit: fit(&trajectory.h_series(), scenario),
        u_fit: has_u(&problem).then(|| fit(&trajectory.u_series(), scenario)).flatten(),
        max_abs_accel: trajectory.max_abs_accel(),
        monitors,
        string_attenuation,
        files: Vec::new(),
    };
    Ok(Run {
        scenario: scenario.clone(),
        problem,
        trajectory,
        distance,
        report,
    })
}

/// Runs a scenario and, given a directory, writes its CSV, chart and report files.
pub fn simulate(scenario: &Scenario, out_dir: Option<&Path>) -> LabResult<Run> {
    let mut run = run_scenario(scenario)?;
    if let Some(dir) = out_dir {
        run.report.files = emit(&run, dir)?;
    }
    Ok(run)
}

fn emit(run: &Run, dir: &Path) -> LabResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let problem = &run.problem;
    let samples = &run.trajectory.samples;
    let n = problem.n();
    let mut files = Vec::new();
    let mut put = |name: &str| {
        let p = dir.join(name);
        files.push(p.clone());
        p
    };

    run.scenario.save(&put("scenario.toml"))?;
    write_trajectory_csv(&put("trajectory.csv"), &run.trajectory, problem)?;

    let bidirectional = problem.controller.law == ControlLaw::Bidirectional;
    let with_u = has_u(problem);
    let mut header = vec!["t".to_string(), "H".into()];
    if with_u {
        header.push("U".into());
    }
    if bidirectional {
        header.push("Hdot".into());
    }
    header.extend(["min_spacing", "max_abs_accel", "dist_to_equilibrium"].map(String::from));
    let rows = samples.iter().zip(&run.distance).map(|(s, d)| {
        let mut r = vec![s.t, s.h];
        if with_u {
            r.push(s.u.unwrap_or(f64::NAN));
        }
        if bidirectional {
            r.push(s.hdot.unwrap_or(f64::NAN));
        }
        r.extend([s.min_spacing, s.max_abs_accel, d.1]);
        r
    });
    write_table(&put("diagnostics.csv"), &header, rows)?;

    // Per-figure series: (file stem, title, y label, column names, values per sample).
    type Extract<'a> = Box<dyn Fn(&crate::sim::Sample) -> Vec<f64> + 'a>;
    let v_star = problem.controller.v_star();
    let mut figures: Vec<(&str, &str, &str, Vec<String>, Extract)> = vec![
        (
            "speeds",
            "Speeds",
            "v (m/s)",
            (1..=n).map(|i| format!("v_{i}")).collect(),
            Box::new(|s| s.state.speeds.clone()),
        ),
        (
            "spacings",
            "Spacings",
            "s (m)",
            spacing_names(problem),
            Box::new(|s| spacing_values(problem, s)),
        ),
        (
            "accelerations",
            "Accelerations",
            "F (m/s^2)",
            (1..=n).map(|i| format!("F_{i}")).collect(),
            Box::new(|s| s.accel.clone()),
        ),
    ];
    if problem.disturbance.is_some() {
        figures.push((
            "speed_deviation",
            "Speed deviation from v*",
            "v - v* (m/s)",
            (1..=n).map(|i| format!("dv_{i}")).collect(),
            Box::new(move |s| s.state.speeds.iter().map(|v| v - v_star).collect()),
        ));
    }
    let mut log_cols = vec!["log10_H".to_string()];
    if with_u {
        log_cols.push("log10_U".into());
    }
    figures.push((
        "lyapunov",
        "Lyapunov functions",
        "log10",
        log_cols,
        Box::new(|s| {
            let mut r = vec![s.h.log10()];
            if let Some(u) = s.u {
                r.push(u.log10());
            }
            r
        }),
    ));

    for (stem, title, y_label, cols, extract) in &figures {
        let values: Vec<Vec<f64>> = samples.iter().map(extract).collect();
        let mut header = vec!["t".to_string()];
        header.extend(cols.iter().cloned());
        write_table(
            &put(&format!("{stem}.csv")),
            &header,
            samples.iter().zip(&values).map(|(s, v)| {
                let mut r = vec![s.t];
                r.extend(v);
                r
            }),
        )?;
        let mut chart = LineChart::new(*title, "t (s)", *y_label);
        for (k, name) in cols.iter().enumerate() {
            let points = samples.iter().zip(&values).map(|(s, v)| (s.t, v[k])).collect();
            chart = chart.with_series(Series::new(name.clone(), points));
        }
        let path = put(&format!("{stem}.svg"));
        std::fs::write(&path, chart.render()).map_err(|e| LabError::io(&path, e))?;
    }

    let path = put("report.txt");
    std::fs::write(&path, run.report.summary()).map_err(|e| LabError::io(&path, e))?;
    Ok(files)
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

impl RunReport {
    /// Plain-text summary; contains no timings, so equal runs print equal text.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "scenario            {} ({})",
            self.scenario,
            &self.scenario_hash[..12]
        );
        let _ = writeln!(s, "termination         {}", self.termination);
        let _ = writeln!(s, "final time          {}", self.final_time);
        let _ = writeln!(s, "final gaps          {}", list(&self.final_gaps));
        let _ = writeln!(s, "final speeds        {}", list(&self.final_state.speeds));
        let _ = writeln!(s, "max |v - v*|        {:.3e}", self.final_speed_deviation);
        let _ = writeln!(s, "H                   {:.3e}", self.final_h);
        if let Some(u) = self.final_u {
            let _ = writeln!(s, "U                   {u:.3e}");
        }
        let _ = writeln!(s, "dist to equilibrium {:.3e}", self.dist_to_equilibrium);
        for (label, f) in [("ln H slope", self.h_fit), ("ln U slope", self.u_fit)] {
            if let Some(f) = f {
                let _ = writeln!(
                    s,
                    "{label:<20}{:.5} (R^2 {:.5}, {} points)",
                    f.slope, f.r_squared, f.points
                );
            }
        }
        let _ = writeln!(s, "max |F|             {:.6}", self.max_abs_accel);
        if let Some(a) = &self.string_attenuation {
            let _ = writeln!(s, "window peaks        {}", list(&a.window_peaks));
        }
        for m in &self.monitors.results {
            let status = match m.first_violation {
                None => "ok".to_string(),
                Some(t) => format!("VIOLATED at t = {t}"),
            };
            let _ = writeln!(
                s,
                "monitor {:<12}{status} (worst margin {:.3e})",
                m.kind.name(),
                m.worst_margin
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::preset;

    #[test]
    fn equilibrium_series_are_constant() {
        let mut sc = preset("ring-point").unwrap();
        sc.initial = PlatoonState::uniform(4, 32.5, 30.0);
        sc.integrator.t_end = 20.0;
        let run = run_scenario(&sc).unwrap();
        let first = &run.trajectory.samples[0];
        for s in &run.trajectory.samples {
            for (a, b) in s.state.to_vector().iter().zip(first.state.to_vector()) {
                assert!((a - b).abs() <= 1e-9);
            }
            assert!(s.max_abs_accel <= 1e-9);
        }
        assert!(run.report.monitors.passed());
    }

    #[test]
    fn emits_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut sc = preset("string-stability").unwrap();
        sc.integrator.t_end = 3.0;
        sc.integrator.sample_stride = 0.1;
        let run = simulate(&sc, Some(dir.path())).unwrap();
        let names: Vec<String> = run
            .report
            .files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for f in [
            "scenario.toml",
            "trajectory.csv",
            "diagnostics.csv",
            "speeds.svg",
            "speed_deviation.csv",
            "lyapunov.csv",
            "report.txt",
        ] {
            assert!(names.iter().any(|n| n == f), "missing {f}");
        }
        assert!(run.report.files.iter().all(|p| p.is_file()));
        let back = Scenario::load(&dir.path().join("scenario.toml")).unwrap();
        assert_eq!(back, sc);
    }
}
