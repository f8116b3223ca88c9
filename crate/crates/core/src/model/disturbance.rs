//! Prescribed leader speed: one period of a cosine on `[π/2, 5π/2)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::SaturationSpec;

pub const WINDOW_START: f64 = FRAC_PI_2;
pub const WINDOW_END: f64 = 5.0 * FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSchedule {
    /// Amplitude `d` (m/s).
    pub amplitude: f64,
}

impl DisturbanceSchedule {
    pub fn new(amplitude: f64, saturation: &SaturationSpec) -> Result<Self> {
        let schedule = Self { amplitude };
        schedule.validate(saturation)?;
        Ok(schedule)
    }

    /// The signal must stay inside `(0, v_max)`.
    pub fn validate(&self, saturation: &SaturationSpec) -> Result<()> {
        let limit = saturation.v_star().min(saturation.v_max() - saturation.v_star());
        if !(self.amplitude > 0.0 && self.amplitude < limit) {
            return Err(ModelError::InvalidParameter(format!(
                "disturbance amplitude must lie in (0, {limit}), got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    pub fn is_active(t: f64) -> bool {
        (WINDOW_START..WINDOW_END).contains(&t)
    }

    pub fn speed(&self, t: f64, v_star: f64) -> f64 {
        if Self::is_active(t) {
            v_star + self.amplitude * t.cos()
        } else {
            v_star
        }
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        if Self::is_active(t) {
            -self.amplitude * t.sin()
        } else {
            0.0
        }
    }
}

/// Leader speed `v_1(t)` under the schedule.
pub fn disturbance_signal(t: f64, schedule: &DisturbanceSchedule, saturation: &SaturationSpec) -> f64 {
    schedule.speed(t, saturation.v_star())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sat() -> SaturationSpec {
        SaturationSpec::new(20.0, 35.0).unwrap()
    }

    #[test]
    fn piecewise_values() {
        let d = DisturbanceSchedule::new(14.0, &sat()).unwrap();
        assert_eq!(disturbance_signal(0.0, &d, &sat()), 20.0);
        assert!((disturbance_signal(PI, &d, &sat()) - 6.0).abs() < 1e-12);
        assert_eq!(disturbance_signal(10.0, &d, &sat()), 20.0);
        assert_eq!(d.acceleration(1.0), 0.0);
    }

    #[test]
    fn continuous_at_both_junctions() {
        let d = DisturbanceSchedule::new(14.0, &sat()).unwrap();
        for edge in [WINDOW_START, WINDOW_END] {
            let inside = 20.0 + 14.0 * edge.cos();
            assert!((inside - 20.0).abs() < 1e-13);
            let before = disturbance_signal(edge - 1e-9, &d, &sat());
            let after = disturbance_signal(edge + 1e-9, &d, &sat());
            assert!((before - after).abs() < 1e-7);
        }
    }

    #[test]
    fn amplitude_range() {
        assert!(DisturbanceSchedule::new(15.0, &sat()).is_err());
        assert!(DisturbanceSchedule::new(0.0, &sat()).is_err());
        assert!(DisturbanceSchedule::new(14.99, &sat()).is_ok());
    }
}
