//! Explicit Runge-Kutta stepping with dense output.
//!
//! Both methods work on a flat state vector. A step is refused, never
//! projected, when a stage leaves the system's domain; the adaptive method
//! also refuses steps whose guard value (the Lyapunov function, when it is
//! known to be nonincreasing) grows beyond tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4Fixed,
    /// Dormand-Prince 5(4) with error control.
    Rk45Adaptive,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rk4-fixed" | "rk4" => Ok(Method::Rk4Fixed),
            "rk45-adaptive" | "rk45" | "dopri5" => Ok(Method::Rk45Adaptive),
            other => Err(format!(
                "unknown method {other:?} (expected rk4-fixed or rk45-adaptive)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub method: Method,
    /// Step of the fixed method (s).
    pub dt: f64,
    /// First trial step of the adaptive method (s).
    pub dt_init: f64,
    pub rtol: f64,
    pub atol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Spacing of the output grid (s).
    pub sample_stride: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            dt: 1e-3,
            dt_init: 1e-3,
            rtol: 1e-8,
            atol: 1e-10,
            dt_min: 1e-12,
            dt_max: 0.05,
            t_end: 100.0,
            sample_stride: 0.1,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {x}"
                )))
            }
        };
        positive("t_end", self.t_end)?;
        positive("sample_stride", self.sample_stride)?;
        match self.method {
            Method::Rk4Fixed => positive("dt", self.dt)?,
            Method::Rk45Adaptive => {
                positive("rtol", self.rtol)?;
                positive("atol", self.atol)?;
                positive("dt_min", self.dt_min)?;
                positive("dt_max", self.dt_max)?;
                positive("dt_init", self.dt_init)?;
                if self.dt_min > self.dt_max {
                    return Err(ModelError::InvalidParameter(format!(
                        "dt_min {} exceeds dt_max {}",
                        self.dt_min, self.dt_max
                    )));
                }
            }
        }
        Ok(())
    }

    /// Output times `0, stride, 2 stride, ...` up to `t_end`, with `t_end`
    /// appended when it is off the grid.
    pub fn sample_times(&self) -> Vec<f64> {
        let count = (self.t_end / self.sample_stride * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|k| k as f64 * self.sample_stride).collect();
        let last = *times.last().unwrap_or(&0.0);
        if self.t_end - last > 1e-9 * self.sample_stride {
            times.push(self.t_end);
        } else if let Some(l) = times.last_mut() {
            *l = self.t_end;
        }
        times
    }
}

/// A vector field with a domain and an optional guard value that must not grow.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    /// Writes `dy/dt` into `out`; `Err` when `y` is outside the domain.
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> std::result::Result<(), String>;
    fn admissible(&self, y: &[f64]) -> bool;
    fn guard(&self, _t: f64, _y: &[f64]) -> Option<f64> {
        None
    }
}

/// Polynomial interpolant over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    kind: DenseKind,
}

#[derive(Debug, Clone)]
enum DenseKind {
    /// Cubic Hermite on the end values and slopes.
    Hermite {
        y0: Vec<f64>,
        y1: Vec<f64>,
        f0: Vec<f64>,
        f1: Vec<f64>,
    },
    /// Dormand-Prince continuous extension of order four.
    Dopri { r: [Vec<f64>; 5], y1: Vec<f64> },
}

impl DenseStep {
    pub fn y1(&self) -> &[f64] {
        match &self.kind {
            DenseKind::Hermite { y1, .. } => y1,
            DenseKind::Dopri { y1, .. } => y1,
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let h = self.t1 - self.t0;
        let th = ((t - self.t0) / h).clamp(0.0, 1.0);
        if th == 1.0 {
            return self.y1().to_vec();
        }
        match &self.kind {
            DenseKind::Hermite { y0, y1, f0, f1 } => {
                let th2 = th * th;
                let th3 = th2 * th;
                let h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
                let h10 = th3 - 2.0 * th2 + th;
                let h01 = -2.0 * th3 + 3.0 * th2;
                let h11 = th3 - th2;
                (0..y0.len())
                    .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
                    .collect()
            }
            DenseKind::Dopri { r, .. } => {
                let s = 1.0 - th;
                (0..r[0].len())
                    .map(|i| r[0][i] + th * (r[1][i] + s * (r[2][i] + th * (r[3][i] + s * r[4][i]))))
                    .collect()
            }
        }
    }
}

/// Why stepping stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// No step from the current state could be accepted inside the domain.
    StateSpaceViolation {
        t: f64,
        detail: String,
    },
    /// The adaptive step fell below `dt_min`.
    StepUnderflow {
        t: f64,
        dt: f64,
    },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => write!(f, "completed"),
            Termination::StateSpaceViolation { t, detail } => {
                write!(f, "state-space violation at t = {t}: {detail}")
            }
            Termination::StepUnderflow { t, dt } => write!(f, "step underflow at t = {t} (dt = {dt:e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub termination: Termination,
    pub t: f64,
    pub y: Vec<f64>,
    pub stats: StepStats,
}

/// Integrates from `(t0, y0)` to `settings.t_end`, handing every accepted
/// step to `on_step`. Returning `Err` from the callback stops the run with a
/// state-space violation.
pub fn solve<S: OdeSystem>(
    system: &S,
    t0: f64,
    y0: &[f64],
    settings: &IntegratorSettings,
    on_step: impl FnMut(&DenseStep) -> std::result::Result<(), String>,
) -> Result<Outcome> {
    settings.validate()?;
    if y0.len() != system.dim() {
        return Err(ModelError::Shape(format!(
            "initial vector has length {}, system dimension is {}",
            y0.len(),
            system.dim()
        )));
    }
    if !system.admissible(y0) {
        return Err(ModelError::InvalidParameter(
            "initial state is outside the domain".into(),
        ));
    }
    match settings.method {
        Method::Rk4Fixed => Ok(rk4(system, t0, y0, settings, on_step)),
        Method::Rk45Adaptive => Ok(dopri5(system, t0, y0, settings, on_step)),
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    (0..y.len())
        .map(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
        .collect()
}

fn close_enough(t: f64, t_end: f64) -> bool {
    t_end - t <= 1e-12 * t_end.abs().max(1.0)
}

fn rk4<S: OdeSystem>(
    system: &S,
    t0: f64,
    y0: &[f64],
    settings: &IntegratorSettings,
    mut on_step: impl FnMut(&DenseStep) -> std::result::Result<(), String>,
) -> Outcome {
    let n = system.dim();
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let stop = |t: f64, y: Vec<f64>, stats, detail: String| Outcome {
        termination: Termination::StateSpaceViolation { t, detail },
        t,
        y,
        stats,
    };
    stats.rhs_evals += 1;
    if let Err(e) = system.rhs(t, &y, &mut k1) {
        return stop(t, y, stats, e);
    }
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    let mut step = 0usize;
    while !close_enough(t, settings.t_end) {
        // Step boundaries are multiples of dt from t0 so that rounding does
        // not accumulate over long runs.
        let t_next = (t0 + (step + 1) as f64 * settings.dt).min(settings.t_end);
        let h = t_next - t;
        let stages = (|| {
            let y2 = axpy(&y, 0.5 * h, &[(1.0, &k1)]);
            system.rhs(t + 0.5 * h, &y2, &mut k2)?;
            let y3 = axpy(&y, 0.5 * h, &[(1.0, &k2)]);
            system.rhs(t + 0.5 * h, &y3, &mut k3)?;
            let y4 = axpy(&y, h, &[(1.0, &k3)]);
            system.rhs(t_next, &y4, &mut k4)?;
            let y1 = axpy(&y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
            if !system.admissible(&y1) {
                return Err("step leaves the state space".to_string());
            }
            system.rhs(t_next, &y1, &mut f1)?;
            Ok(y1)
        })();
        stats.rhs_evals += 4;
        let y1 = match stages {
            Ok(y1) => y1,
            Err(e) => return stop(t, y, stats, e),
        };
        let dense = DenseStep {
            t0: t,
            t1: t_next,
            kind: DenseKind::Hermite {
                y0: y.clone(),
                y1: y1.clone(),
                f0: k1.clone(),
                f1: f1.clone(),
            },
        };
        stats.accepted += 1;
        if let Err(e) = on_step(&dense) {
            return stop(t_next, y1, stats, e);
        }
        t = t_next;
        y = y1;
        std::mem::swap(&mut k1, &mut f1);
        step += 1;
    }
    Outcome {
        termination: Termination::Completed,
        t,
        y,
        stats,
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Continuous-extension weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

enum Trial {
    Accepted {
        y1: Vec<f64>,
        k7: Vec<f64>,
        err: f64,
    },
    /// Error estimate above tolerance.
    TooCoarse {
        err: f64,
    },
    /// Left the domain, hit a domain error, or grew the guard.
    Refused {
        detail: String,
        domain: bool,
    },
}

fn dopri5<S: OdeSystem>(
    system: &S,
    t0: f64,
    y0: &[f64],
    settings: &IntegratorSettings,
    mut on_step: impl FnMut(&DenseStep) -> std::result::Result<(), String>,
) -> Outcome {
    let n = system.dim();
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    stats.rhs_evals += 1;
    if let Err(detail) = system.rhs(t, &y, &mut k[0]) {
        return Outcome {
            termination: Termination::StateSpaceViolation { t, detail },
            t,
            y,
            stats,
        };
    }
    let mut guard = system.guard(t, &y);
    let mut h = settings.dt_init.min(settings.dt_max);
    let mut last_refusal: Option<(String, bool)> = None;
    let mut after_reject = false;

    while !close_enough(t, settings.t_end) {
        let remaining = settings.t_end - t;
        let h_try = h.min(remaining);
        if h_try < settings.dt_min && h_try < remaining {
            let termination = match last_refusal.take() {
                Some((detail, true)) => Termination::StateSpaceViolation { t, detail },
                _ => Termination::StepUnderflow { t, dt: h_try },
            };
            return Outcome {
                termination,
                t,
                y,
                stats,
            };
        }

        let trial = dopri_trial(system, t, &y, h_try, &mut k, settings, guard, &mut stats);
        match trial {
            Trial::Accepted { y1, k7, err } => {
                let t1 = t + h_try;
                let t1 = if close_enough(t1, settings.t_end) {
                    settings.t_end
                } else {
                    t1
                };
                let dense = dopri_dense(&y, &y1, &k, &k7, h_try);
                let step = DenseStep { t0: t, t1, kind: dense };
                stats.accepted += 1;
                if let Err(detail) = on_step(&step) {
                    return Outcome {
                        termination: Termination::StateSpaceViolation { t: t1, detail },
                        t: t1,
                        y: y1,
                        stats,
                    };
                }
                guard = system.guard(t1, &y1);
                t = t1;
                y = y1;
                k[0] = k7;
                let mut factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
                factor = factor.clamp(0.2, 5.0);
                if after_reject {
                    factor = factor.min(1.0);
                }
                h = (h_try * factor).min(settings.dt_max);
                after_reject = false;
                last_refusal = None;
            }
            Trial::TooCoarse { err } => {
                stats.rejected += 1;
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                after_reject = true;
            }
            Trial::Refused { detail, domain } => {
                stats.rejected += 1;
                h = 0.5 * h_try;
                after_reject = true;
                last_refusal = Some((detail, domain));
            }
        }
    }
    Outcome {
        termination: Termination::Completed,
        t,
        y,
        stats,
    }
}

#[allow(clippy::too_many_arguments)]
fn dopri_trial<S: OdeSystem>(
    system: &S,
    t: f64,
    y: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    settings: &IntegratorSettings,
    guard: Option<f64>,
    stats: &mut StepStats,
) -> Trial {
    let n = y.len();
    for s in 1..6 {
        let stage: Vec<f64> = (0..n)
            .map(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
            .collect();
        stats.rhs_evals += 1;
        if let Err(detail) = system.rhs(t + C[s] * h, &stage, &mut k[s]) {
            return Trial::Refused { detail, domain: true };
        }
    }
    let y1: Vec<f64> = (0..n)
        .map(|i| y[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>())
        .collect();
    if !system.admissible(&y1) {
        return Trial::Refused {
            detail: "step leaves the state space".into(),
            domain: true,
        };
    }
    let mut k7 = vec![0.0; n];
    stats.rhs_evals += 1;
    if let Err(detail) = system.rhs(t + h, &y1, &mut k7) {
        return Trial::Refused { detail, domain: true };
    }
    let mut sum = 0.0;
    for i in 0..n {
        let e = h * ((0..6).map(|j| E[j] * k[j][i]).sum::<f64>() + E[6] * k7[i]);
        let scale = settings.atol + settings.rtol * y[i].abs().max(y1[i].abs());
        sum += (e / scale).powi(2);
    }
    let err = (sum / n as f64).sqrt();
    if !(err <= 1.0) {
        return Trial::TooCoarse {
            err: if err.is_finite() { err } else { 1e10 },
        };
    }
    if let Some(before) = guard {
        if let Some(after) = system.guard(t + h, &y1) {
            if after > before + settings.atol + settings.rtol * before {
                return Trial::Refused {
                    detail: format!("Lyapunov value rose from {before:e} to {after:e}"),
                    domain: false,
                };
            }
        }
    }
    Trial::Accepted { y1, k7, err }
}

fn dopri_dense(y0: &[f64], y1: &[f64], k: &[Vec<f64>], k7: &[f64], h: f64) -> DenseKind {
    let n = y0.len();
    let diff: Vec<f64> = (0..n).map(|i| y1[i] - y0[i]).collect();
    let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - diff[i]).collect();
    let r3: Vec<f64> = (0..n).map(|i| diff[i] - h * k7[i] - bspl[i]).collect();
    let r4: Vec<f64> = (0..n)
        .map(|i| h * ((0..6).map(|j| D[j] * k[j][i]).sum::<f64>() + D[6] * k7[i]))
        .collect();
    DenseKind::Dopri {
        r: [y0.to_vec(), diff, bspl, r3, r4],
        y1: y1.to_vec(),
    }
}
