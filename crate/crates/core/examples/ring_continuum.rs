//! Four vehicles on a ring long enough that any gaps of at least lambda are
//! an equilibrium. Pass a directory to write the CSV and SVG files.
//!
//!     cargo run --release --example ring_continuum -- out/ring-continuum

use platoon_lab::lab::{preset, verify};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    let scenario = preset("ring-continuum")?;
    let v = verify(&scenario, out.as_deref().map(std::path::Path::new))?;
    print!("{}", v.run.report.summary());
    println!();
    print!("{}", v.table());

    // H keeps shrinking, but slowly: V is very flat near lambda.
    println!("\n{:>8}  {:>12}  {:>10}", "t", "H", "min gap");
    for s in v.run.trajectory.samples.iter().step_by(300) {
        println!("{:>8.1}  {:>12.4e}  {:>10.4}", s.t, s.h, s.min_spacing);
    }
    Ok(())
}
