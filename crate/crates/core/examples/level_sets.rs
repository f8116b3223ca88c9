//! A-priori bounds on the ring sublevel sets {H <= r}, against states drawn
//! uniformly from each set.

use platoon_lab::analysis::{level_set_bounds, sample_sublevel_set};
use platoon_lab::model::{ControllerConfig, PotentialSpec, SaturationSpec, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // lambda = 30 on a ring of 130, so H vanishes on the equilibrium set.
    let cfg = ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(0.1, 5.0, 30.0)?,
        SaturationSpec::new(30.0, 35.0)?,
    )?;
    let ring = Topology::Ring { length: 130.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!(
        "{:>5} {:>8} {:>8} {:>8} | {:>8} {:>8} {:>8} {:>10}",
        "r", "c", "v_lo", "v_hi", "min gap", "min v", "max v", "proposals"
    );
    for r in [0.1, 1.0, 10.0] {
        let b = level_set_bounds(r, &cfg)?;
        let (mut gap, mut lo, mut hi, mut tries) = (f64::INFINITY, f64::INFINITY, 0.0f64, 0);
        for _ in 0..2000 {
            let (state, k) = sample_sublevel_set(&mut rng, r, &ring, 4, &cfg, 0.2, 10_000_000)?;
            tries += k;
            let s1 = 130.0 - state.spacings.iter().sum::<f64>();
            gap = state.spacings.iter().copied().fold(gap.min(s1), f64::min);
            lo = state.speeds.iter().copied().fold(lo, f64::min);
            hi = state.speeds.iter().copied().fold(hi, f64::max);
        }
        println!(
            "{:>5} {:>8.4} {:>8.4} {:>8.4} | {:>8.4} {:>8.4} {:>8.4} {:>10}",
            r, b.c, b.v_lower, b.v_upper, gap, lo, hi, tries
        );
    }
    Ok(())
}
