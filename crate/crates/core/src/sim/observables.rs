//! Derived observables of finished trajectories.

use std::f64::consts::PI;

use crate::error::{ModelError, Result};
use crate::model::{WINDOW_END, WINDOW_START};
use crate::sim::{Problem, Trajectory};

/// Peak speed deviations while the prescribed leader decelerates and then
/// accelerates.
///
/// While the leader slows down (`[π/2, π]`) the deviation is the speed
/// deficit `v* - v_i`, followed backwards from vehicle 2. While it speeds up
/// (`[π, 2π]`) the deviation is the excess `v_i - v*`, followed forwards from
/// the vehicle ahead of the leader on a ring. Each chain stops at the vehicle
/// farthest from the leader, where the two directions meet.
#[derive(Debug, Clone, PartialEq)]
pub struct StringAttenuation {
    pub amplitude: f64,
    /// Peak `|v_i - v*|` over the whole disturbance window, per vehicle.
    pub window_peaks: Vec<f64>,
    /// `(vehicle, peak deficit)` in backward propagation order, one-based.
    pub deceleration_chain: Vec<(usize, f64)>,
    /// `(vehicle, peak excess)` in forward propagation order, one-based.
    pub acceleration_chain: Vec<(usize, f64)>,
}

fn nonincreasing(chain: &[(usize, f64)]) -> bool {
    chain.windows(2).all(|w| w[1].1 <= w[0].1)
}

impl StringAttenuation {
    pub fn measure(trajectory: &Trajectory, problem: &Problem) -> Result<Self> {
        let Some(schedule) = problem.disturbance else {
            return Err(ModelError::Unsupported(
                "string attenuation needs a disturbance schedule".into(),
            ));
        };
        let n = problem.n();
        let v_star = problem.controller.v_star();
        let peak = |i: usize, from: f64, to: f64, dev: &dyn Fn(f64) -> f64| {
            trajectory
                .samples
                .iter()
                .filter(|s| s.t >= from && s.t <= to)
                .fold(0.0f64, |m, s| m.max(dev(s.state.speeds[i])))
        };
        let abs = |v: f64| (v - v_star).abs();
        let deficit = |v: f64| v_star - v;
        let excess = |v: f64| v - v_star;
        let window_peaks = (0..n).map(|i| peak(i, WINDOW_START, WINDOW_END, &abs)).collect();

        let ring = problem.topology.is_ring();
        // Zero-based index of the vehicle where the two directions meet.
        let far = if ring { n / 2 } else { n - 1 };
        let deceleration_chain = (1..=far)
            .map(|i| (i + 1, peak(i, WINDOW_START, PI, &deficit)))
            .collect();
        let acceleration_chain = if ring {
            (far..n)
                .rev()
                .map(|i| (i + 1, peak(i, PI, 2.0 * PI, &excess)))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            amplitude: schedule.amplitude,
            window_peaks,
            deceleration_chain,
            acceleration_chain,
        })
    }

    /// Every follower's peak deviation stays strictly below the amplitude.
    pub fn bounded_by_amplitude(&self) -> bool {
        self.window_peaks.iter().skip(1).all(|&p| p < self.amplitude)
    }

    pub fn attenuates(&self) -> bool {
        nonincreasing(&self.deceleration_chain) && nonincreasing(&self.acceleration_chain)
    }
}
