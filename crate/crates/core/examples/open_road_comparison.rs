//! Five bunched, slow vehicles on an open road under the bidirectional law
//! and under the constant-target baseline law.

use platoon_lab::lab::{preset, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<22} {:>12} {:>10} {:>9}", "preset", "final H", "max |F|", "steps");
    for name in ["open-road-compare-48", "open-road-compare-73"] {
        let run = run_scenario(&preset(name)?)?;
        let r = &run.report;
        println!(
            "{:<22} {:>12.4e} {:>10.5} {:>9}",
            name, r.final_h, r.max_abs_accel, run.trajectory.stats.accepted
        );
        for t in [0.0, 10.0, 100.0, 1000.0, 10000.0] {
            let s = &run.trajectory.samples[t as usize];
            println!("    t = {:>7}: H = {:.4e}, speeds {:.3?}", t, s.h, s.state.speeds);
        }
    }
    Ok(())
}
