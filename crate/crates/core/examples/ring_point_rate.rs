//! Ring with a unique uniform equilibrium: U decays exponentially, at least
//! as fast as the guaranteed rate.

use platoon_lab::analysis::{mu_n, RateConstants, DEFAULT_G_FRAK};
use platoon_lab::lab::{preset, run_scenario};
use platoon_lab::sim::{above_floor, fit_decay_rate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = preset("ring-point")?;
    let rate = RateConstants::new(&scenario.controller, &scenario.topology, scenario.n, DEFAULT_G_FRAK)?;
    println!("mu_n = {}  (closed form {})", rate.mu_n, mu_n(scenario.n)?);
    println!("guaranteed rate omega_bar = {}", rate.omega_bar);

    let run = run_scenario(&scenario)?;
    let u = run.trajectory.u_series();
    let window = above_floor(&u, 1e-12);
    let fit = fit_decay_rate(window, 0.5)?;
    println!(
        "ln U tail slope {:.5} over {} points, R^2 {:.6}",
        fit.slope, fit.points, fit.r_squared
    );
    println!("U reaches 1e-12 at t = {:.1}", window.last().map_or(0.0, |p| p.0));
    println!("final gaps {:?}", run.report.final_gaps);
    Ok(())
}
