//! Repulsive spacing potential.
//!
//! The potential is a barrier at the safety distance `L` and vanishes, together
//! with its first three derivatives, at the interaction distance `λ`:
//!
//! ```text
//! V(s) = q (λ - s)^4 / (s - L)^2   for L < s <= λ
//! V(s) = 0                         for s > λ
//! ```
//!
//! An open-road boundary gap is represented by `f64::INFINITY`; every function
//! here returns exactly zero for it.

use serde::{Deserialize, Serialize};

use crate::error::{outside, ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// Repulsion gain `q`.
    pub q: f64,
    /// Safety distance `L` (m). Spacings must stay strictly above it.
    pub safety_distance: f64,
    /// Interaction distance `λ` (m). No coupling beyond it.
    pub interaction_distance: f64,
}

impl PotentialSpec {
    pub fn new(q: f64, safety_distance: f64, interaction_distance: f64) -> Result<Self> {
        let spec = Self {
            q,
            safety_distance,
            interaction_distance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.q.is_finite() && self.safety_distance.is_finite() && self.interaction_distance.is_finite();
        if !finite || self.q <= 0.0 {
            return Err(ModelError::InvalidParameter(format!(
                "potential gain q must be positive and finite, got {}",
                self.q
            )));
        }
        if !(self.safety_distance > 0.0 && self.interaction_distance > self.safety_distance) {
            return Err(ModelError::InvalidParameter(format!(
                "need interaction distance > safety distance > 0, got lambda = {}, L = {}",
                self.interaction_distance, self.safety_distance
            )));
        }
        Ok(())
    }

    /// Splits a spacing into `(u, w) = (max(λ - s, 0), s - L)`.
    ///
    /// Returns `None` for spacings at or beyond `λ` (including the infinite
    /// sentinel), where the potential and all its derivatives are zero.
    fn split(&self, s: f64) -> Result<Option<(f64, f64)>> {
        if s.is_nan() || s <= self.safety_distance {
            return Err(outside("spacing", s, format!("({}, +inf]", self.safety_distance)));
        }
        if s >= self.interaction_distance {
            return Ok(None);
        }
        Ok(Some((self.interaction_distance - s, s - self.safety_distance)))
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(match self.split(s)? {
            None => 0.0,
            Some((u, w)) => {
                let u2 = u * u;
                self.q * (u2 * u2) / (w * w)
            }
        })
    }

    /// `V'(s) = -q u^3 (4w + 2u) / w^3`.
    pub fn d1(&self, s: f64) -> Result<f64> {
        Ok(match self.split(s)? {
            None => 0.0,
            Some((u, w)) => -self.q * u * u * u * (4.0 * w + 2.0 * u) / (w * w * w),
        })
    }

    /// `V''(s) = q u^2 (12 w^2 + 16 u w + 6 u^2) / w^4`.
    pub fn d2(&self, s: f64) -> Result<f64> {
        Ok(match self.split(s)? {
            None => 0.0,
            Some((u, w)) => {
                let w2 = w * w;
                self.q * u * u * (12.0 * w2 + 16.0 * u * w + 6.0 * u * u) / (w2 * w2)
            }
        })
    }

    /// Inverts `V` on `(L, λ)` by bisection: the unique `c` with `V(c) = level`.
    ///
    /// `V` is strictly decreasing there, so the root is unique.
    pub fn inverse(&self, level: f64) -> Result<f64> {
        if !(level > 0.0) || !level.is_finite() {
            return Err(outside("potential level", level, "(0, +inf)"));
        }
        let (mut lo, mut hi) = (self.safety_distance, self.interaction_distance);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-10 || mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid)? > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
