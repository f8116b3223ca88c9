//! One-parameter sweeps. Rows run in parallel and come back in value order.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::mu_n;
use crate::lab::output::number;
use crate::lab::{simulate, LabError, LabResult, Scenario};
use crate::model::{ExtendedSpacings, PlatoonState, PotentialSpec, Topology};
use crate::sim::{convergence_time, DecayFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Mu,
    Lambda,
    Q,
    /// Vehicle count; a ring keeps its length per vehicle.
    N,
    /// Ring length; gaps are rescaled proportionally.
    R,
    /// Disturbance amplitude.
    D,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Mu => "mu",
            Axis::Lambda => "lambda",
            Axis::Q => "q",
            Axis::N => "n",
            Axis::R => "R",
            Axis::D => "d",
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mu" => Ok(Axis::Mu),
            "lambda" => Ok(Axis::Lambda),
            "q" => Ok(Axis::Q),
            "n" => Ok(Axis::N),
            "R" | "r" => Ok(Axis::R),
            "d" => Ok(Axis::D),
            _ => Err(format!("unknown axis {s:?}; expected one of mu, lambda, q, n, R, d")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowSummary {
    pub termination: String,
    pub completed: bool,
    /// First time after which the distance to equilibrium stays within the
    /// scenario's `convergence_tol`.
    pub convergence_time: Option<f64>,
    /// Tail fit of `ln U` when `U` exists, else of `ln H`.
    pub decay: Option<DecayFit>,
    pub max_abs_accel: f64,
    pub monitors_passed: bool,
    /// Smallest nonzero eigenvalue of the cyclic difference form (rings).
    pub mu_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<RowSummary, String>,
}

fn cycled(pattern: &[f64], len: usize) -> Vec<f64> {
    pattern.iter().copied().cycle().take(len).collect()
}

/// The base scenario with one parameter replaced.
pub fn sweep_scenario(base: &Scenario, axis: Axis, value: f64) -> LabResult<Scenario> {
    let mut sc = base.clone();
    sc.name = format!("{}-{}-{value}", base.name, axis.name());
    let p = base.controller.potential;
    match axis {
        Axis::Mu => sc.controller.mu = value,
        Axis::Lambda => sc.controller.potential = PotentialSpec::new(p.q, p.safety_distance, value)?,
        Axis::Q => sc.controller.potential = PotentialSpec::new(value, p.safety_distance, p.interaction_distance)?,
        Axis::N => {
            if !(value >= 2.0 && value.fract() == 0.0) {
                return Err(LabError::Invalid(format!("n must be an integer >= 2, got {value}")));
            }
            let n = value as usize;
            let gaps = ExtendedSpacings::new(&base.initial, &base.topology).gaps().to_vec();
            let speeds = cycled(&base.initial.speeds, n);
            sc.initial = match base.topology {
                Topology::Ring { length } => {
                    let per_vehicle = length / base.n as f64;
                    let new_length = per_vehicle * n as f64;
                    let pattern = cycled(&gaps, n);
                    let scale = new_length / pattern.iter().sum::<f64>();
                    sc.topology = Topology::Ring { length: new_length };
                    PlatoonState::new(pattern[1..].iter().map(|g| g * scale).collect(), speeds)?
                }
                Topology::Open => PlatoonState::new(cycled(&base.initial.spacings, n - 1), speeds)?,
            };
            sc.n = n;
        }
        Axis::R => {
            let Topology::Ring { length } = base.topology else {
                return Err(LabError::Invalid("the R axis needs a ring scenario".into()));
            };
            let scale = value / length;
            sc.topology = Topology::Ring { length: value };
            sc.initial.spacings.iter_mut().for_each(|s| *s *= scale);
        }
        Axis::D => match sc.disturbance.as_mut() {
            Some(d) => d.amplitude = value,
            None => {
                return Err(LabError::Invalid(
                    "the d axis needs a scenario with a disturbance".into(),
                ))
            }
        },
    }
    // Thresholds tied to the base parameters no longer apply.
    if axis != Axis::D {
        sc.thresholds.spacing_target = None;
        sc.thresholds.spacing_tol = None;
        sc.thresholds.max_decay_slope = None;
    }
    sc.validate()?;
    Ok(sc)
}

fn row(base: &Scenario, axis: Axis, value: f64, index: usize, out_dir: Option<&Path>) -> LabResult<RowSummary> {
    let sc = sweep_scenario(base, axis, value)?;
    let dir = out_dir.map(|d| d.join(format!("row-{index:03}")));
    let run = simulate(&sc, dir.as_deref())?;
    let r = &run.report;
    Ok(RowSummary {
        termination: r.termination.to_string(),
        completed: r.termination.is_completed(),
        convergence_time: convergence_time(&run.distance, sc.thresholds.convergence_tol),
        decay: if r.final_u.is_some() { r.u_fit } else { r.h_fit },
        max_abs_accel: r.max_abs_accel,
        monitors_passed: r.monitors.passed(),
        mu_n: if sc.topology.is_ring() { mu_n(sc.n).ok() } else { None },
    })
}

/// Runs every value independently. Invalid values give an error row rather
/// than aborting the sweep. With `out_dir`, row `k` writes to `row-00k/`.
pub fn sweep(base: &Scenario, axis: Axis, values: &[f64], out_dir: Option<&Path>) -> Vec<SweepRow> {
    values
        .par_iter()
        .enumerate()
        .map(|(k, &value)| SweepRow {
            value,
            outcome: row(base, axis, value, k, out_dir).map_err(|e| e.to_string()),
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 10] = [
    "value",
    "completed",
    "convergence_time",
    "decay_slope",
    "decay_r_squared",
    "max_abs_accel",
    "monitors_passed",
    "mu_n",
    "termination",
    "error",
];

pub fn write_sweep_csv(path: &Path, axis: Axis, rows: &[SweepRow]) -> LabResult<()> {
    let file = std::fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = SWEEP_HEADER.iter().map(|s| s.to_string()).collect();
    header[0] = axis.name().to_string();
    w.write_record(&header)?;
    let opt = |x: Option<f64>| x.map_or(String::new(), number);
    for r in rows {
        let record = match &r.outcome {
            Ok(s) => vec![
                number(r.value),
                s.completed.to_string(),
                opt(s.convergence_time),
                opt(s.decay.map(|f| f.slope)),
                opt(s.decay.map(|f| f.r_squared)),
                number(s.max_abs_accel),
                s.monitors_passed.to_string(),
                opt(s.mu_n),
                s.termination.clone(),
                String::new(),
            ],
            Err(e) => {
                let mut v = vec![String::new(); SWEEP_HEADER.len()];
                v[0] = number(r.value);
                v[9] = e.clone();
                v
            }
        };
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::preset;

    #[test]
    fn n_axis_keeps_length_per_vehicle() {
        let base = preset("ring-point").unwrap();
        let sc = sweep_scenario(&base, Axis::N, 6.0).unwrap();
        assert_eq!(sc.topology.ring_length(), Some(32.5 * 6.0));
        assert_eq!(sc.initial.n(), 6);
        let gaps = ExtendedSpacings::new(&sc.initial, &sc.topology);
        assert!((gaps.gaps().iter().sum::<f64>() - 195.0).abs() < 1e-9);
        assert_eq!(sc.initial.speeds, vec![31.0, 28.0, 27.0, 30.0, 31.0, 28.0]);
    }

    #[test]
    fn invalid_values_become_error_rows() {
        let mut base = preset("ring-point").unwrap();
        base.integrator.t_end = 5.0;
        let rows = sweep(&base, Axis::Mu, &[-1.0, 0.2], None);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].outcome.is_err());
        assert!(rows[1].outcome.as_ref().unwrap().completed);
        assert!(sweep(&base, Axis::D, &[3.0], None)[0].outcome.is_err());
        assert!(sweep(&base, Axis::Mu, &[], None).is_empty());
    }

    #[test]
    fn mu_n_column_matches_closed_form() {
        let mut base = preset("ring-point").unwrap();
        base.integrator.t_end = 1.0;
        let values = [3.0, 4.0, 5.0, 8.0];
        for r in sweep(&base, Axis::N, &values, None) {
            let n = r.value;
            let expect = 2.0 * (1.0 - (2.0 * std::f64::consts::PI / n).cos());
            let got = r.outcome.unwrap().mu_n.unwrap();
            assert!((got - expect).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("lambda".parse::<Axis>(), Ok(Axis::Lambda));
        assert_eq!("R".parse::<Axis>(), Ok(Axis::R));
        assert!("speed".parse::<Axis>().is_err());
    }
}
