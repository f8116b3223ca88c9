//! Fixed-step RK4 self-convergence on the ring: halving dt should cut the
//! endpoint error about sixteenfold. One gap starts at 10 m so the transient
//! is fast enough to keep errors well above roundoff.

use platoon_lab::lab::preset;
use platoon_lab::model::PlatoonState;
use platoon_lab::sim::{integrate, IntegratorSettings, Method};

fn endpoint(dt: f64, t_end: f64) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let mut scenario = preset("ring-point")?;
    scenario.initial = PlatoonState::new(vec![10.0, 40.0, 40.0], vec![31.0, 28.0, 27.0, 30.0])?;
    let settings = IntegratorSettings {
        method: Method::Rk4Fixed,
        dt,
        t_end,
        sample_stride: t_end,
        ..IntegratorSettings::default()
    };
    let traj = integrate(&scenario.problem().with_settings(settings))?;
    Ok(traj.final_state.to_vector())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t_end = 1.0;
    let reference = endpoint(1.25e-4, t_end)?;
    let mut previous: Option<f64> = None;
    for dt in [4e-3, 2e-3, 1e-3] {
        let y = endpoint(dt, t_end)?;
        let err = y.iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        match previous {
            Some(p) => println!("dt = {dt:e}: error {err:.3e}, ratio {:.2}", p / err),
            None => println!("dt = {dt:e}: error {err:.3e}"),
        }
        previous = Some(err);
    }
    Ok(())
}
