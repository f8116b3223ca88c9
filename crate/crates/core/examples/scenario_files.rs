//! Scenario files: emit a preset as TOML, edit it, load it back, run it.

use platoon_lab::lab::{preset, run_scenario, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = preset("ring-point")?;
    scenario.name = "ring-point-short".into();
    scenario.integrator.t_end = 60.0;
    let text = scenario.to_toml()?;
    println!("{text}");

    let dir = std::env::temp_dir().join("platoon-lab-scenario");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ring-point-short.toml");
    scenario.save(&path)?;
    let back = Scenario::load(&path)?;
    assert_eq!(back, scenario);
    println!("round trip ok, sha256 {}", back.hash()?);

    let broken = text.replace("spacings = [33.0, 32.0, 27.0]", "spacings = [33.0, 32.0, 4.0]");
    match Scenario::from_toml(&broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected edited file: {e}"),
    }

    let run = run_scenario(&back)?;
    print!("{}", run.report.summary());
    Ok(())
}
