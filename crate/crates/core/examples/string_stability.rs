//! A cosine speed disturbance on the leader of a ring of six, and how far it
//! travels along the string in each direction.

use platoon_lab::lab::{preset, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = preset("string-stability")?;
    let run = run_scenario(&scenario)?;
    let a = run
        .report
        .string_attenuation
        .as_ref()
        .expect("preset has a disturbance");
    println!("amplitude d = {}", a.amplitude);
    println!("peak |v_i - v*| over the disturbance window:");
    for (i, p) in a.window_peaks.iter().enumerate() {
        println!("  vehicle {}  {:.4}", i + 1, p);
    }
    println!("deceleration, travelling backwards:");
    for (i, p) in &a.deceleration_chain {
        println!("  vehicle {i}  {p:.4}");
    }
    println!("acceleration, travelling forwards around the ring:");
    for (i, p) in &a.acceleration_chain {
        println!("  vehicle {i}  {p:.4}");
    }
    println!(
        "bounded by d: {}, attenuates: {}",
        a.bounded_by_amplitude(),
        a.attenuates()
    );
    Ok(())
}
