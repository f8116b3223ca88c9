//! Sweeps the friction gain and the vehicle count of the unique-equilibrium
//! ring. Pass a directory to write `sweep.csv` and one run per row.

use std::path::Path;

use platoon_lab::lab::{preset, sweep, write_sweep_csv, Axis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    let base = preset("ring-point")?;
    for (axis, values) in [
        (Axis::Mu, vec![0.05, 0.1, 0.2, 0.4]),
        (Axis::N, vec![3.0, 4.0, 6.0, 10.0]),
    ] {
        let dir = out.as_ref().map(|d| Path::new(d).join(axis.name()));
        let rows = sweep(&base, axis, &values, dir.as_deref());
        println!(
            "{:>6} {:>10} {:>10} {:>9} {:>9}",
            axis.name(),
            "conv. t",
            "slope",
            "max |F|",
            "mu_n"
        );
        for r in &rows {
            match &r.outcome {
                Ok(s) => println!(
                    "{:>6} {:>10.2} {:>10.5} {:>9.4} {:>9.5}",
                    r.value,
                    s.convergence_time.unwrap_or(f64::NAN),
                    s.decay.map_or(f64::NAN, |f| f.slope),
                    s.max_abs_accel,
                    s.mu_n.unwrap_or(f64::NAN)
                ),
                Err(e) => println!("{:>6} error: {e}", r.value),
            }
        }
        if let Some(dir) = dir {
            write_sweep_csv(&dir.join("sweep.csv"), axis, &rows)?;
        }
        println!();
    }
    Ok(())
}
