//! Saturated speed offset `b`.
//!
//! `b(x) = v* + (v_max / 2) (tanh(x + c) - 1)` with `c = artanh(1 - 2 v* / v_max)`,
//! an increasing map onto `(v* - v_max, v*)` with `b(0) = 0`.
//!
//! With `a = tanh(c) = 1 - 2v*/v_max` and `t = tanh(x)` the addition theorem
//! gives `b(x) = (v_max/2)(1 - a²) t / (1 + a t)`, which is what is evaluated:
//! it vanishes exactly at `x = 0` and never touches the rounded shift `c`.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpeedLimits", into = "SpeedLimits")]
pub struct SaturationSpec {
    v_star: f64,
    v_max: f64,
    shift: f64,
}

/// Serialized form: the shift is always rederived.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct SpeedLimits {
    v_star: f64,
    v_max: f64,
}

impl TryFrom<SpeedLimits> for SaturationSpec {
    type Error = ModelError;

    fn try_from(raw: SpeedLimits) -> Result<Self> {
        SaturationSpec::new(raw.v_star, raw.v_max)
    }
}

impl From<SaturationSpec> for SpeedLimits {
    fn from(spec: SaturationSpec) -> Self {
        SpeedLimits {
            v_star: spec.v_star,
            v_max: spec.v_max,
        }
    }
}

impl SaturationSpec {
    pub fn new(v_star: f64, v_max: f64) -> Result<Self> {
        if !(v_max.is_finite() && v_star.is_finite() && v_star > 0.0 && v_star < v_max) {
            return Err(ModelError::InvalidParameter(format!(
                "need 0 < v* < v_max, got v* = {v_star}, v_max = {v_max}"
            )));
        }
        let arg = 1.0 - 2.0 * v_star / v_max;
        if arg.abs() >= 1.0 {
            return Err(ModelError::InvalidParameter(format!(
                "artanh argument 1 - 2v*/v_max = {arg} must lie in (-1, 1)"
            )));
        }
        Ok(Self {
            v_star,
            v_max,
            shift: arg.atanh(),
        })
    }

    pub fn v_star(&self) -> f64 {
        self.v_star
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `a = 1 - 2v*/v_max`.
    fn skew(&self) -> f64 {
        1.0 - 2.0 * self.v_star / self.v_max
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = self.skew();
        let t = x.tanh();
        let b = 0.5 * self.v_max * (1.0 - a * a) * t / (1.0 + a * t);
        // Rounding at saturated tanh may step just outside the open range.
        b.clamp(self.v_star - self.v_max, self.v_star)
    }

    /// `v* - b(x) = v* (1 - t) / (1 + a t)`, with `1 - t` formed without
    /// cancellation so the result keeps full relative precision near zero.
    pub fn complement(&self, x: f64) -> f64 {
        let a = self.skew();
        let t = x.tanh();
        let one_minus_t = if x > 0.0 {
            2.0 / (1.0 + (2.0 * x).exp())
        } else {
            1.0 - t
        };
        // Exact values lie in (0, v_max); saturated tanh can round one ulp past v_max.
        (self.v_star * one_minus_t / (1.0 + a * t)).min(self.v_max)
    }

    pub fn d1(&self, x: f64) -> f64 {
        let a = self.skew();
        let t = x.tanh();
        let ch = x.cosh();
        let den = ch * (1.0 + a * t);
        0.5 * self.v_max * (1.0 - a * a) / (den * den)
    }

    pub fn contains_speed(&self, v: f64) -> bool {
        v > 0.0 && v < self.v_max
    }
}
