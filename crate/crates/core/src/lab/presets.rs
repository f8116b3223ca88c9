//! Built-in scenarios.

use std::collections::BTreeMap;

use crate::analysis::{rate_omega_bar, ExponentialRegime, DEFAULT_G_FRAK};
use crate::lab::{LabError, LabResult, Scenario, Thresholds};
use crate::model::{
    ControlLaw, ControllerConfig, DisturbanceSchedule, PlatoonState, PotentialSpec, SaturationSpec, Topology,
};
use crate::sim::{IntegratorSettings, MonitorToggles};

pub const PRESET_NAMES: [&str; 6] = [
    "ring-continuum",
    "ring-point",
    "string-stability",
    "open-road-compare-48",
    "open-road-compare-73",
    "prop3-regime",
];

pub fn preset(name: &str) -> LabResult<Scenario> {
    let scenario = match name {
        "ring-continuum" => ring(name, 30.0),
        "ring-point" => ring(name, 40.0),
        "string-stability" => string_stability(),
        "open-road-compare-48" => open_road_compare(name, ControlLaw::Bidirectional),
        "open-road-compare-73" => open_road_compare(
            name,
            ControlLaw::Baseline {
                mu_tilde: 0.1,
                epsilon: 0.1,
            },
        ),
        "prop3-regime" => regime(),
        _ => {
            return Err(LabError::Invalid(format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    }?;
    scenario.validate()?;
    Ok(scenario)
}

fn settings(t_end: f64, sample_stride: f64) -> IntegratorSettings {
    IntegratorSettings {
        t_end,
        sample_stride,
        ..IntegratorSettings::default()
    }
}

fn notes(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

const RING_LENGTH: f64 = 130.0;

/// Four vehicles on a ring of length 130 with a short interaction distance
/// (continuum of equilibria) or a long one (unique uniform equilibrium).
fn ring(name: &str, lambda: f64) -> LabResult<Scenario> {
    let controller = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(0.1, 5.0, lambda)?,
        SaturationSpec::new(30.0, 35.0)?,
    )?;
    let topology = Topology::Ring { length: RING_LENGTH };
    // s_1 = 130 - (33 + 32 + 27) = 38.
    let initial = PlatoonState::new(vec![33.0, 32.0, 27.0], vec![31.0, 28.0, 27.0, 30.0])?;
    let unique = RING_LENGTH < 4.0 * lambda;
    let thresholds = if unique {
        Thresholds {
            speed_tol: Some(1e-3),
            spacing_target: Some(RING_LENGTH / 4.0),
            spacing_tol: Some(1e-2),
            max_decay_slope: Some(-rate_omega_bar(&controller, &topology, 4, DEFAULT_G_FRAK)?),
            min_r_squared: Some(0.99),
            ..Thresholds::default()
        }
    } else {
        Thresholds {
            speed_tol: Some(1e-3),
            min_final_spacing: Some(lambda - 1e-3),
            max_final_lyapunov: Some(1e-6),
            ..Thresholds::default()
        }
    };
    let description = if unique {
        "Ring with R < n lambda: convergence to the uniform spacing 32.5 at speed 30"
    } else {
        "Ring with R >= n lambda: convergence to the set of gaps >= 30 at speed 30"
    };
    Ok(Scenario {
        name: name.to_string(),
        description: description.to_string(),
        n: 4,
        topology,
        controller,
        initial,
        disturbance: None,
        integrator: settings(300.0, 0.1),
        monitors: MonitorToggles::default(),
        thresholds,
        notes: notes(&[("s_1", "derived from the ring length: 130 - (33 + 32 + 27) = 38")]),
    })
}

/// Six vehicles at the uniform equilibrium of a ring while the leader's
/// speed follows one cosine period of amplitude 14.
fn string_stability() -> LabResult<Scenario> {
    let controller = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(0.1, 5.0, 40.0)?,
        SaturationSpec::new(20.0, 35.0)?,
    )?;
    let n = 6;
    let disturbance = DisturbanceSchedule::new(14.0, &controller.saturation)?;
    Ok(Scenario {
        name: "string-stability".into(),
        description: "Leader speed disturbance on a ring of six vehicles starting at equilibrium".into(),
        n,
        topology: Topology::Ring { length: RING_LENGTH },
        controller,
        initial: PlatoonState::uniform(n, RING_LENGTH / n as f64, 20.0),
        disturbance: Some(disturbance),
        integrator: settings(30.0, 0.01),
        monitors: MonitorToggles::default(),
        thresholds: Thresholds {
            string_attenuation: true,
            ..Thresholds::default()
        },
        notes: notes(&[("q", "0.1, the same potential as the ring presets")]),
    })
}

/// Five vehicles on an open road starting bunched up and slow. The horizon
/// is long because gaps approach the interaction distance only slowly.
fn open_road_compare(name: &str, law: ControlLaw) -> LabResult<Scenario> {
    let lambda: f64 = 35.0;
    let controller = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(lambda.powi(-3), 5.0, lambda)?,
        SaturationSpec::new(30.0, 35.0)?,
    )?
    .with_law(law);
    controller.validate()?;
    let thresholds = Thresholds {
        max_final_lyapunov: Some(1e-4),
        max_accel_below_preset: (law == ControlLaw::Bidirectional).then(|| "open-road-compare-73".to_string()),
        ..Thresholds::default()
    };
    let description = match law {
        ControlLaw::Bidirectional => "Open road, bidirectional law with spacing-dependent target speed",
        ControlLaw::Baseline { .. } => "Open road, constant-target law with state-dependent gain",
    };
    Ok(Scenario {
        name: name.to_string(),
        description: description.to_string(),
        n: 5,
        topology: Topology::Open,
        controller,
        initial: PlatoonState::uniform(5, 19.0, 20.0),
        disturbance: None,
        integrator: IntegratorSettings {
            dt_max: 1.0,
            ..settings(30_000.0, 1.0)
        },
        monitors: MonitorToggles::default(),
        thresholds,
        notes: notes(&[("q", "lambda^-3")]),
    })
}

/// Open road with gaps wide enough for the exponential speed envelope.
fn regime() -> LabResult<Scenario> {
    let lambda: f64 = 35.0;
    let controller = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(lambda.powi(-3), 5.0, lambda)?,
        SaturationSpec::new(30.0, 35.0)?,
    )?;
    let speeds = vec![31.0, 29.0, 30.5, 28.0, 30.0];
    // With every gap at least lambda all target speeds equal v*, so Gamma
    // does not depend on the gaps; probe it with gaps at lambda.
    let probe = PlatoonState::new(vec![lambda; 4], speeds.clone())?;
    let required = ExponentialRegime::check(&probe, &controller)?.required_spacing;
    let spacings = [2.0, 7.0, 0.5, 12.0].iter().map(|extra| required + extra).collect();
    let initial = PlatoonState::new(spacings, speeds)?;
    Ok(Scenario {
        name: "prop3-regime".into(),
        description: "Open road with gaps beyond lambda + (v_max/mu) Gamma: exponential speed envelope".into(),
        n: 5,
        topology: Topology::Open,
        controller,
        initial,
        disturbance: None,
        integrator: settings(100.0, 0.05),
        monitors: MonitorToggles::default(),
        thresholds: Thresholds::default(),
        notes: notes(&[
            ("q", "lambda^-3"),
            ("spacings", "lambda + (v_max/mu) Gamma plus 2, 7, 0.5 and 12 m"),
        ]),
    })
}
