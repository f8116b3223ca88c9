//! Equilibrium sets and Euclidean distance to them in `(s_2..s_n, v_1..v_n)`.

use crate::analysis::has_unique_equilibrium;
use crate::error::{ModelError, Result};
use crate::model::{ControllerConfig, PlatoonState, Topology};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumSet {
    /// `R >= nλ`: every gap at least `λ` (closing gap included), all speeds `v*`.
    RingContinuum {
        ring_length: f64,
        n: usize,
        lambda: f64,
        v_star: f64,
    },
    /// `R < nλ`: the uniform state `(R/n, v*)`.
    RingPoint { ring_length: f64, n: usize, v_star: f64 },
    /// Open road: every gap at least `λ`, all speeds `v*`.
    OpenSet { n: usize, lambda: f64, v_star: f64 },
}

impl EquilibriumSet {
    pub fn for_config(topology: &Topology, n: usize, cfg: &ControllerConfig) -> Self {
        let lambda = cfg.potential.interaction_distance;
        let v_star = cfg.v_star();
        match *topology {
            Topology::Ring { length } if has_unique_equilibrium(topology, n, cfg) => EquilibriumSet::RingPoint {
                ring_length: length,
                n,
                v_star,
            },
            Topology::Ring { length } => EquilibriumSet::RingContinuum {
                ring_length: length,
                n,
                lambda,
                v_star,
            },
            Topology::Open => EquilibriumSet::OpenSet { n, lambda, v_star },
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            EquilibriumSet::RingContinuum { n, .. }
            | EquilibriumSet::RingPoint { n, .. }
            | EquilibriumSet::OpenSet { n, .. } => n,
        }
    }

    /// Whether this set belongs to the given topology.
    pub fn matches(&self, topology: &Topology) -> bool {
        match (self, topology) {
            (EquilibriumSet::OpenSet { .. }, Topology::Open) => true,
            (
                EquilibriumSet::RingContinuum { ring_length, .. } | EquilibriumSet::RingPoint { ring_length, .. },
                Topology::Ring { length },
            ) => ring_length == length,
            _ => false,
        }
    }
}

/// Euclidean projection of `z` onto `{y >= 0, Σ y <= budget}`.
fn project_capped_orthant(z: &[f64], budget: f64) -> Vec<f64> {
    let clamped: Vec<f64> = z.iter().map(|&x| x.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= budget {
        return clamped;
    }
    // Otherwise the sum constraint is active: project onto the simplex
    // {y >= 0, Σ y = budget} by the sort-and-threshold rule.
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - budget) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        }
    }
    z.iter().map(|&x| (x - theta).max(0.0)).collect()
}

pub fn dist_to_equilibrium(state: &PlatoonState, eq: &EquilibriumSet) -> Result<f64> {
    state.check_shape()?;
    if state.n() != eq.n() {
        return Err(ModelError::InvalidParameter(format!(
            "state has {} vehicles, equilibrium set {}",
            state.n(),
            eq.n()
        )));
    }
    let speed_part = |v_star: f64| state.speeds.iter().map(|v| (v - v_star).powi(2)).sum::<f64>();
    let squared = match *eq {
        EquilibriumSet::RingPoint { ring_length, n, v_star } => {
            let c = ring_length / n as f64;
            state.spacings.iter().map(|s| (s - c).powi(2)).sum::<f64>() + speed_part(v_star)
        }
        EquilibriumSet::OpenSet { lambda, v_star, .. } => {
            state
                .spacings
                .iter()
                .map(|&s| (lambda - s).max(0.0).powi(2))
                .sum::<f64>()
                + speed_part(v_star)
        }
        EquilibriumSet::RingContinuum {
            ring_length,
            n,
            lambda,
            v_star,
        } => {
            let budget = ring_length - n as f64 * lambda;
            if budget < 0.0 {
                return Err(ModelError::InvalidParameter(format!(
                    "continuum needs R >= n lambda, got R = {ring_length}"
                )));
            }
            let shifted: Vec<f64> = state.spacings.iter().map(|s| s - lambda).collect();
            let projected = project_capped_orthant(&shifted, budget);
            shifted
                .iter()
                .zip(&projected)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                + speed_part(v_star)
        }
    };
    Ok(squared.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_inside_the_sets() {
        let open = EquilibriumSet::OpenSet {
            n: 3,
            lambda: 35.0,
            v_star: 30.0,
        };
        let state = PlatoonState::new(vec![35.0, 90.0], vec![30.0; 3]).unwrap();
        assert_eq!(dist_to_equilibrium(&state, &open).unwrap(), 0.0);

        let cont = EquilibriumSet::RingContinuum {
            ring_length: 130.0,
            n: 4,
            lambda: 30.0,
            v_star: 30.0,
        };
        let state = PlatoonState::new(vec![30.0, 35.0, 31.0], vec![30.0; 4]).unwrap();
        assert_eq!(dist_to_equilibrium(&state, &cont).unwrap(), 0.0);
    }

    #[test]
    fn single_speed_offset() {
        let open = EquilibriumSet::OpenSet {
            n: 3,
            lambda: 35.0,
            v_star: 30.0,
        };
        let state = PlatoonState::new(vec![40.0, 36.0], vec![27.5, 30.0, 30.0]).unwrap();
        assert_relative_eq!(dist_to_equilibrium(&state, &open).unwrap(), 2.5);
    }

    #[test]
    fn continuum_projection_respects_closing_gap() {
        // Budget R - nλ = 10; free gaps 30 + (8, 8, 0) overshoot it, leaving the
        // closing gap at 14 < λ. Projection onto {y >= 0, Σy <= 10} from
        // (8, 8, 0) is (5, 5, 0): distance √18.
        let cont = EquilibriumSet::RingContinuum {
            ring_length: 130.0,
            n: 4,
            lambda: 30.0,
            v_star: 30.0,
        };
        let state = PlatoonState::new(vec![38.0, 38.0, 30.0], vec![30.0; 4]).unwrap();
        assert_relative_eq!(
            dist_to_equilibrium(&state, &cont).unwrap(),
            18f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn projection_matches_brute_force() {
        let z = [3.0, -1.0, 7.5, 0.2];
        let p = project_capped_orthant(&z, 4.0);
        let d = |y: &[f64]| z.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let best = d(&p);
        // Grid search over the feasible set.
        let step = 0.05;
        let steps = (4.0 / step) as usize;
        let mut brute = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=steps - a {
                let y = [a as f64 * step, 0.0, b as f64 * step, 0.0];
                brute = brute.min(d(&y));
            }
        }
        assert!(best <= brute + 1e-12);
        assert!(p.iter().all(|&y| y >= 0.0) && p.iter().sum::<f64>() <= 4.0 + 1e-12);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let point = EquilibriumSet::RingPoint {
            ring_length: 130.0,
            n: 4,
            v_star: 30.0,
        };
        let state = PlatoonState::uniform(3, 40.0, 30.0);
        assert!(dist_to_equilibrium(&state, &point).is_err());
    }
}
