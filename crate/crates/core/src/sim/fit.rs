//! Log-linear decay fits and convergence times of sampled series.

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Least-squares slope of `ln(value)` against `t`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 10;

/// Fits `ln(value) = intercept + slope t` over the last `tail_fraction` of
/// the series.
pub fn fit_decay_rate(series: &[(f64, f64)], tail_fraction: f64) -> Result<DecayFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let take = ((series.len() as f64) * tail_fraction).round() as usize;
    let window = &series[series.len() - take.min(series.len())..];
    if window.len() < MIN_FIT_POINTS {
        return Err(ModelError::InvalidParameter(format!(
            "need at least {MIN_FIT_POINTS} points in the fit window, got {}",
            window.len()
        )));
    }
    if let Some(&(t, v)) = window.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(ModelError::InvalidParameter(format!(
            "nonpositive value {v} at t = {t} in the fit window"
        )));
    }
    let n = window.len() as f64;
    let mean_t = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = window.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for &(t, v) in window {
        let dt = t - mean_t;
        let dy = v.ln() - mean_y;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(ModelError::InvalidParameter(
            "fit window has a single time value".into(),
        ));
    }
    let slope = sty / stt;
    let r_squared = if syy == 0.0 { 1.0 } else { sty * sty / (stt * syy) };
    Ok(DecayFit {
        slope,
        intercept: mean_y - slope * mean_t,
        r_squared,
        points: window.len(),
    })
}

/// Leading part of a series before it first drops to `floor` or below.
pub fn above_floor(series: &[(f64, f64)], floor: f64) -> &[(f64, f64)] {
    let end = series.iter().position(|&(_, v)| !(v > floor)).unwrap_or(series.len());
    &series[..end]
}

/// First time after which `value <= threshold` holds for the rest of the
/// series, or `None` if the last sample is still above it.
pub fn convergence_time(series: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let last_bad = series.iter().rposition(|&(_, v)| !(v <= threshold));
    match last_bad {
        None => series.first().map(|p| p.0),
        Some(i) if i + 1 < series.len() => Some(series[i + 1].0),
        Some(_) => None,
    }
}
