//! Road topology, platoon state and the spacing closure.
//!
//! Vehicles are indexed from zero here. Vehicle `j` follows vehicle `j - 1`;
//! the gap in front of vehicle `j` is `s_{j+1}` in one-based terms. The stored
//! state holds the free spacings `s_2..s_n` and all speeds `v_1..v_n`.

use serde::{Deserialize, Serialize};

use crate::error::{outside, ModelError, Result};
use crate::model::{PotentialSpec, SaturationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Topology {
    /// Circular road; the leader follows the last vehicle.
    Ring { length: f64 },
    /// Open road; the leader has nobody ahead and the last vehicle nobody behind.
    Open,
}

impl Topology {
    pub fn is_ring(&self) -> bool {
        matches!(self, Topology::Ring { .. })
    }

    pub fn ring_length(&self) -> Option<f64> {
        match *self {
            Topology::Ring { length } => Some(length),
            Topology::Open => None,
        }
    }

    /// A ring must be long enough to fit `n` safety distances.
    pub fn validate(&self, n: usize, potential: &PotentialSpec) -> Result<()> {
        if n < 2 {
            return Err(ModelError::InvalidParameter(format!(
                "need at least two vehicles, got {n}"
            )));
        }
        if let Topology::Ring { length } = *self {
            let min = n as f64 * potential.safety_distance;
            if !(length.is_finite() && length > min) {
                return Err(ModelError::InvalidParameter(format!(
                    "ring length {length} must exceed n * L = {min}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatoonState {
    /// Free spacings `s_2..s_n` (m).
    pub spacings: Vec<f64>,
    /// Speeds `v_1..v_n` (m/s).
    pub speeds: Vec<f64>,
}

impl PlatoonState {
    pub fn new(spacings: Vec<f64>, speeds: Vec<f64>) -> Result<Self> {
        let state = Self { spacings, speeds };
        state.check_shape()?;
        Ok(state)
    }

    /// Every spacing equal to `spacing`, every speed equal to `speed`.
    pub fn uniform(n: usize, spacing: f64, speed: f64) -> Self {
        Self {
            spacings: vec![spacing; n.saturating_sub(1)],
            speeds: vec![speed; n],
        }
    }

    pub fn n(&self) -> usize {
        self.speeds.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.speeds.len() < 2 || self.spacings.len() + 1 != self.speeds.len() {
            return Err(ModelError::Shape(format!(
                "expected n - 1 spacings for n >= 2 speeds, got {} spacings and {} speeds",
                self.spacings.len(),
                self.speeds.len()
            )));
        }
        Ok(())
    }

    /// Membership in the open state space of the topology.
    pub fn validate(&self, topology: &Topology, potential: &PotentialSpec, saturation: &SaturationSpec) -> Result<()> {
        self.check_shape()?;
        let l = potential.safety_distance;
        for &s in &self.spacings {
            if !(s > l) || !s.is_finite() {
                return Err(outside("spacing", s, format!("({l}, +inf)")));
            }
        }
        if let Topology::Ring { length } = *topology {
            let lead_gap = length - self.spacings.iter().sum::<f64>();
            if !(lead_gap > l) {
                return Err(outside("closing spacing s_1", lead_gap, format!("({l}, +inf)")));
            }
        }
        for &v in &self.speeds {
            if !saturation.contains_speed(v) {
                return Err(outside("speed", v, format!("(0, {})", saturation.v_max())));
            }
        }
        Ok(())
    }

    /// Packs the state as `[s_2..s_n, v_1..v_n]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.spacings.len() + self.speeds.len());
        y.extend_from_slice(&self.spacings);
        y.extend_from_slice(&self.speeds);
        y
    }

    pub fn from_vector(y: &[f64]) -> Result<Self> {
        if y.len() < 3 || y.len().is_multiple_of(2) {
            return Err(ModelError::Shape(format!(
                "state vector length must be 2n - 1 with n >= 2, got {}",
                y.len()
            )));
        }
        let n = y.len().div_ceil(2);
        Ok(Self {
            spacings: y[..n - 1].to_vec(),
            speeds: y[n - 1..].to_vec(),
        })
    }

    /// Speed of the vehicle ahead of `j` (`v_{i-1}`); the ring wraps, and on an
    /// open road the leader sees its own speed.
    pub fn speed_ahead(&self, j: usize, topology: &Topology) -> f64 {
        match (j, topology) {
            (0, Topology::Ring { .. }) => self.speeds[self.n() - 1],
            (0, Topology::Open) => self.speeds[0],
            _ => self.speeds[j - 1],
        }
    }

    /// Speed of the vehicle behind `j` (`v_{i+1}`).
    pub fn speed_behind(&self, j: usize, topology: &Topology) -> f64 {
        let n = self.n();
        if j + 1 < n {
            self.speeds[j + 1]
        } else if topology.is_ring() {
            self.speeds[0]
        } else {
            self.speeds[j]
        }
    }
}

/// All `n + 1` spacings `s_1..s_{n+1}` after applying the topology closure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSpacings(Vec<f64>);

impl ExtendedSpacings {
    pub fn new(state: &PlatoonState, topology: &Topology) -> Self {
        let n = state.n();
        let mut ext = Vec::with_capacity(n + 1);
        let boundary = match *topology {
            Topology::Ring { length } => length - state.spacings.iter().sum::<f64>(),
            Topology::Open => f64::INFINITY,
        };
        ext.push(boundary);
        ext.extend_from_slice(&state.spacings);
        ext.push(boundary);
        Self(ext)
    }

    /// Gap between vehicle `j` and the vehicle ahead of it (`s_i`).
    pub fn ahead(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// Gap between vehicle `j` and the vehicle behind it (`s_{i+1}`).
    pub fn behind(&self, j: usize) -> f64 {
        self.0[j + 1]
    }

    /// `s_1..s_{n+1}`.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The `n` physical gaps `s_1..s_n`; the open-road leader gap is infinite.
    pub fn gaps(&self) -> &[f64] {
        &self.0[..self.0.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> (PotentialSpec, SaturationSpec) {
        (
            PotentialSpec::new(0.1, 5.0, 30.0).unwrap(),
            SaturationSpec::new(30.0, 35.0).unwrap(),
        )
    }

    #[test]
    fn ring_closure_recovers_leading_gap() {
        let ring = Topology::Ring { length: 130.0 };
        let state = PlatoonState::new(vec![33.0, 32.0, 27.0], vec![31.0, 28.0, 27.0, 30.0]).unwrap();
        let ext = ExtendedSpacings::new(&state, &ring);
        assert_eq!(ext.as_slice(), &[38.0, 33.0, 32.0, 27.0, 38.0]);
        assert_eq!(ext.gaps().iter().sum::<f64>(), 130.0);
        assert_eq!(state.speed_ahead(0, &ring), 30.0);
        assert_eq!(state.speed_behind(3, &ring), 31.0);
    }

    #[test]
    fn open_road_boundaries_are_infinite() {
        let state = PlatoonState::uniform(3, 20.0, 25.0);
        let ext = ExtendedSpacings::new(&state, &Topology::Open);
        assert_eq!(ext.ahead(0), f64::INFINITY);
        assert_eq!(ext.behind(2), f64::INFINITY);
        assert_eq!(ext.behind(0), 20.0);
    }

    #[test]
    fn validation_rejects_boundary_states() {
        let (pot, sat) = specs();
        let ring = Topology::Ring { length: 130.0 };
        let ok = PlatoonState::new(vec![33.0, 32.0, 27.0], vec![31.0, 28.0, 27.0, 30.0]).unwrap();
        ok.validate(&ring, &pot, &sat).unwrap();

        let mut bad = ok.clone();
        bad.speeds[2] = 35.0;
        assert!(bad.validate(&ring, &pot, &sat).is_err());
        bad.speeds[2] = 0.0;
        assert!(bad.validate(&ring, &pot, &sat).is_err());

        let mut bad = ok.clone();
        bad.spacings[0] = 5.0;
        assert!(bad.validate(&ring, &pot, &sat).is_err());

        // Leading gap squeezed to L.
        let bad = PlatoonState::new(vec![40.0, 40.0, 45.0], vec![30.0; 4]).unwrap();
        assert!(bad.validate(&ring, &pot, &sat).is_err());
        bad.validate(&Topology::Open, &pot, &sat).unwrap();
    }

    #[test]
    fn vector_round_trip() {
        let state = PlatoonState::new(vec![33.0, 32.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(PlatoonState::from_vector(&state.to_vector()).unwrap(), state);
        assert!(PlatoonState::from_vector(&[1.0, 2.0]).is_err());
        assert!(PlatoonState::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn ring_too_short_is_rejected() {
        let (pot, _) = specs();
        assert!(Topology::Ring { length: 20.0 }.validate(4, &pot).is_err());
        assert!(Topology::Ring { length: 21.0 }.validate(4, &pot).is_ok());
        assert!(Topology::Open.validate(1, &pot).is_err());
    }
}
