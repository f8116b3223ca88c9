//! Open road with gaps wide enough that speeds settle within an explicit
//! exponential envelope and no gap ever closes below lambda.

use platoon_lab::analysis::ExponentialRegime;
use platoon_lab::lab::{preset, run_scenario};
use platoon_lab::sim::MonitorKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = preset("prop3-regime")?;
    let regime = ExponentialRegime::check(&scenario.initial, &scenario.controller)?;
    println!(
        "Gamma = {:.6}, required gap = {:.4}",
        regime.gamma, regime.required_spacing
    );
    println!("initial gaps {:?}", scenario.initial.spacings);

    let run = run_scenario(&scenario)?;
    let v_star = scenario.controller.v_star();
    println!(
        "\n{:>6}  {:>12}  {:>12}  {:>9}",
        "t", "max|v - v*|", "envelope", "min gap"
    );
    for s in run.trajectory.samples.iter().step_by(200) {
        let dev = s.state.speeds.iter().fold(0.0f64, |m, v| m.max((v - v_star).abs()));
        println!(
            "{:>6.1}  {:>12.4e}  {:>12.4e}  {:>9.3}",
            s.t,
            dev,
            regime.speed_envelope(s.t),
            s.min_spacing
        );
    }
    for kind in [MonitorKind::SpeedEnvelope, MonitorKind::SpacingFloor] {
        let m = run.report.monitors.get(kind).expect("premise holds");
        println!(
            "{:<15} worst margin {:.3e}, passed {}",
            kind.name(),
            m.worst_margin,
            m.passed()
        );
    }
    Ok(())
}
