//! Exponential-rate constants for the unique-equilibrium ring.

use crate::error::{ModelError, Result};
use crate::model::{ControllerConfig, Topology};

/// Smallest nonzero eigenvalue of the cyclic second-difference form
/// `Σ (x_i - x_{i-1})²` with `x_0 = x_n`: `2(1 - cos(2π/n))`.
pub fn mu_n(n: usize) -> Result<f64> {
    check_count(n)?;
    // Rational cosines are returned exactly rather than through `sin`.
    Ok(match n {
        2 => 4.0,
        3 => 3.0,
        4 => 2.0,
        6 => 1.0,
        _ => {
            // 2(1 - cos 2a) = 4 sin² a avoids the cancellation for large n.
            let half_angle = std::f64::consts::PI / n as f64;
            4.0 * half_angle.sin().powi(2)
        }
    })
}

fn check_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(ModelError::InvalidParameter(format!(
            "need at least two vehicles, got {n}"
        )));
    }
    Ok(())
}

/// The cyclic second-difference matrix, built entry by entry from the
/// quadratic form `Σ_i (x_i - x_{i-1})²`.
pub fn cyclic_difference_matrix(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        let prev = (i + n - 1) % n;
        // (x_i - x_prev)² = x_i² - 2 x_i x_prev + x_prev²
        c[i][i] += 1.0;
        c[prev][prev] += 1.0;
        c[i][prev] -= 1.0;
        c[prev][i] -= 1.0;
    }
    c
}

/// Independent estimate of [`mu_n`]: power iteration with `σI - C` on the
/// complement of the all-ones kernel, where `σ = 5` strictly bounds the spectrum of `C`.
/// The dominant eigenvalue there is `σ - μ_n`.
pub fn oracle_mu_n(n: usize) -> Result<f64> {
    check_count(n)?;
    let c = cyclic_difference_matrix(n);
    let sigma = 5.0;
    let deflate = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|xi| *xi -= mean);
    };
    let normalize = |x: &mut [f64]| {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|xi| *xi /= norm);
    };
    // Irregular start so that every nonconstant mode is present.
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            t + 0.37 * (1.3 * t).sin()
        })
        .collect();
    deflate(&mut x);
    normalize(&mut x);

    let mut estimate = 0.0;
    let mut y = vec![0.0; n];
    for iter in 0..200_000 {
        for i in 0..n {
            y[i] = sigma * x[i] - c[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        }
        deflate(&mut y);
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
        let converged = (rayleigh - estimate).abs() <= 1e-15 * sigma;
        estimate = rayleigh;
        if converged && iter > 10 {
            break;
        }
    }
    Ok(sigma - estimate)
}

/// Guaranteed exponential decay rate `min(μ, 𝔊² b'(0) V''(R/n) μ_n)` of the
/// unique-equilibrium ring, for a user-chosen `𝔊 ∈ (0, 1)`.
pub fn rate_omega_bar(cfg: &ControllerConfig, topology: &Topology, n: usize, g_frak: f64) -> Result<f64> {
    Ok(RateConstants::new(cfg, topology, n, g_frak)?.omega_bar)
}

/// Default `𝔊`.
pub const DEFAULT_G_FRAK: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub mu_n: f64,
    pub omega_bar: f64,
    pub g_frak: f64,
}

impl RateConstants {
    pub fn new(cfg: &ControllerConfig, topology: &Topology, n: usize, g_frak: f64) -> Result<Self> {
        let Some(length) = topology.ring_length() else {
            return Err(ModelError::Unsupported(
                "rate constant is defined on a ring only".into(),
            ));
        };
        if !(g_frak > 0.0 && g_frak < 1.0) {
            return Err(ModelError::InvalidParameter(format!(
                "G must lie in (0, 1), got {g_frak}"
            )));
        }
        let mu_n = mu_n(n)?;
        let spacing = length / n as f64;
        if spacing >= cfg.potential.interaction_distance {
            return Err(ModelError::InvalidParameter(format!(
                "rate constant needs R < n lambda (V''(R/n) > 0); R/n = {spacing}"
            )));
        }
        let curvature = cfg.potential.d2(spacing)?;
        let coupling = g_frak * g_frak * cfg.saturation.d1(0.0) * curvature * mu_n;
        Ok(Self {
            mu_n,
            omega_bar: cfg.mu.min(coupling),
            g_frak,
        })
    }
}
