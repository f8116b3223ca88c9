//! dH/dt assembled by the chain rule from the vector field, against the
//! closed form, on random ring and open-road states.

use platoon_lab::analysis::{hdot_analytic, hdot_chain_rule, hdot_parts, random_state};
use platoon_lab::model::{ControllerConfig, PotentialSpec, SaturationSpec, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(0.1, 5.0, 40.0)?,
        SaturationSpec::new(30.0, 35.0)?,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for topology in [Topology::Ring { length: 130.0 }, Topology::Open] {
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let state = random_state(&mut rng, &topology, 4, &cfg)?;
            let a = hdot_analytic(&state, &topology, &cfg)?;
            let c = hdot_chain_rule(&state, &topology, &cfg)?;
            worst = worst.max((a - c).abs() / a.abs().max(1e-300));
            let (friction, viscous) = hdot_parts(&state, &topology, &cfg)?;
            assert!(friction <= 0.0 && viscous <= 0.0);
        }
        println!("{topology:?}: worst relative difference {worst:.2e} over 1000 states");
    }
    Ok(())
}
