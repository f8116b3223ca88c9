//! Properties of the Lyapunov functions, equilibrium distances and bounds.

use approx::assert_relative_eq;
use platoon_lab::analysis::{
    dist_to_equilibrium, level_set_bounds, lyapunov_h, lyapunov_u, random_state, spacing_ceiling, EquilibriumSet,
};
use platoon_lab::lab::preset;
use platoon_lab::model::{ControllerConfig, PlatoonState, PotentialSpec, SaturationSpec, Topology};
use platoon_lab::sim::{integrate, IntegratorSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RING: Topology = Topology::Ring { length: 130.0 };

fn cfg(q: f64, lambda: f64) -> ControllerConfig {
    ControllerConfig::bidirectional(
        0.1,
        PotentialSpec::new(q, 5.0, lambda).unwrap(),
        SaturationSpec::new(30.0, 35.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn open_road_h_ignores_gaps_beyond_interaction_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c = cfg(35f64.powi(-3), 35.0);
    for _ in 0..2000 {
        let state = random_state(&mut rng, &Topology::Open, 5, &c).unwrap();
        let clamped = state.spacings.iter().map(|&s| s.min(35.0)).collect();
        let projected = PlatoonState::new(clamped, state.speeds.clone()).unwrap();
        let a = lyapunov_h(&state, &Topology::Open, &c).unwrap();
        let b = lyapunov_h(&projected, &Topology::Open, &c).unwrap();
        assert_eq!(a, b, "{state:?}");
    }
}

#[test]
fn u_is_positive_away_from_the_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let c = cfg(0.1, 40.0);
    assert_eq!(
        lyapunov_u(&PlatoonState::uniform(4, 32.5, 30.0), &RING, &c).unwrap(),
        0.0
    );
    for _ in 0..10_000 {
        let state = random_state(&mut rng, &RING, 4, &c).unwrap();
        assert!(lyapunov_u(&state, &RING, &c).unwrap() > 0.0, "{state:?}");
    }
}

#[test]
fn u_is_quadratic_near_the_point() {
    let c = cfg(0.1, 40.0);
    let ratios: Vec<f64> = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
        .iter()
        .map(|&d| {
            let state = PlatoonState::new(vec![32.5 + d, 32.5, 32.5], vec![30.0; 4]).unwrap();
            lyapunov_u(&state, &RING, &c).unwrap() / (d * d)
        })
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    // Fitted sandwich a1 d^2 <= U <= a2 d^2 with a1 > 0 and a bounded spread.
    assert!(lo > 0.0 && hi / lo < 1.1, "{ratios:?}");
}

#[test]
fn open_road_distance_respects_global_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let c = cfg(35f64.powi(-3), 35.0);
    let n = 5;
    let set = EquilibriumSet::for_config(&Topology::Open, n, &c);
    let nf = n as f64;
    let bound = (nf * 5f64.powi(2) + nf * 30f64.powi(2) + nf * 30f64.powi(2)).sqrt();
    for _ in 0..10_000 {
        let state = random_state(&mut rng, &Topology::Open, n, &c).unwrap();
        assert!(dist_to_equilibrium(&state, &set).unwrap() <= bound);
    }
}

#[test]
fn open_road_distance_of_single_speed_offset() {
    let c = cfg(35f64.powi(-3), 35.0);
    let set = EquilibriumSet::for_config(&Topology::Open, 5, &c);
    for d in [-3.0, -0.25, 0.5, 4.0] {
        let mut speeds = vec![30.0; 5];
        speeds[0] += d;
        let state = PlatoonState::new(vec![35.0, 40.0, 90.0, 35.5], speeds).unwrap();
        assert_relative_eq!(
            dist_to_equilibrium(&state, &set).unwrap(),
            f64::abs(d),
            max_relative = 1e-14
        );
    }
}

#[test]
fn level_set_bounds_are_monotone_in_r() {
    let c = cfg(0.1, 40.0);
    let mut prev = level_set_bounds(1e-3, &c).unwrap();
    let mut r = 2e-3;
    // Past r ~ 400 the lower speed bound is subnormal and then underflows to 0.
    while r < 1e2 {
        let b = level_set_bounds(r, &c).unwrap();
        assert!(
            b.c <= prev.c && b.v_upper >= prev.v_upper && b.v_lower <= prev.v_lower,
            "r = {r}"
        );
        assert!(5.0 < b.c && b.c < 40.0);
        // For large r the target speed saturates and the upper bound rounds to v_max.
        assert!(
            0.0 < b.v_lower && b.v_lower <= 30.0 && 30.0 <= b.v_upper && b.v_upper <= 35.0,
            "{b:?}"
        );
        if r <= 1.0 {
            assert!(b.v_upper < 35.0, "{b:?}");
        }
        prev = b;
        r *= 1.7;
    }
    for r in [1e3, 1e4, 1e6] {
        let b = level_set_bounds(r, &c).unwrap();
        assert!(b.c > 5.0 && b.v_lower >= 0.0 && b.v_upper <= 35.0, "{b:?}");
    }
    assert!(level_set_bounds(0.0, &c).is_err());
}

/// `H_S` of the open-road comparison start, evaluated by hand.
fn compare_start_h() -> f64 {
    let q = 35f64.powi(-3);
    let (u, w): (f64, f64) = (35.0 - 19.0, 19.0 - 5.0);
    let dv = q * (-4.0 * u * u * u / (w * w) - 2.0 * u.powi(4) / (w * w * w));
    let v = q * u.powi(4) / (w * w);
    let c = (1.0 - 60.0 / 35.0f64).atanh();
    let b = |x: f64| 30.0 + 17.5 * ((x + c).tanh() - 1.0);
    // Leader: gap ahead infinite, gap behind 19. Tail: the reverse. Middle: balanced.
    let f = [30.0 - b(dv), 30.0, 30.0, 30.0, 30.0 - b(-dv)];
    let kinetic: f64 = f.iter().map(|fi| (20.0 - fi).powi(2) / (20.0 * 15.0)).sum::<f64>() * 35.0 * 35.0 / 2.0;
    kinetic + 4.0 * v
}

#[test]
fn spacing_ceiling_of_compare_start_is_frozen() {
    let sc = preset("open-road-compare-48").unwrap();
    let h = lyapunov_h(&sc.initial, &sc.topology, &sc.controller).unwrap();
    assert_relative_eq!(h, compare_start_h(), max_relative = 1e-12);
    assert_relative_eq!(h, 1020.8626506624107, max_relative = 1e-12);
    let ceiling = spacing_ceiling(&sc.initial, &sc.controller).unwrap();
    let expected = 35.0 + 35.0 * (2.0 * h).sqrt() / (2.0 * 0.1 * 5.0);
    assert_eq!(ceiling.len(), 4);
    for c in ceiling {
        assert_relative_eq!(c, expected, max_relative = 1e-12);
        assert_relative_eq!(c, 1616.4909086437729, max_relative = 1e-12);
    }
}

#[test]
fn spacing_ceiling_on_equilibria_is_the_gap() {
    let c = cfg(35f64.powi(-3), 35.0);
    let state = PlatoonState::new(vec![35.0, 50.0, 120.0], vec![30.0; 4]).unwrap();
    assert_eq!(spacing_ceiling(&state, &c).unwrap(), vec![35.0, 50.0, 120.0]);
}

/// Central differences of sampled `H` against the closed-form derivative.
fn hdot_against_differences(stride: f64, t_end: f64, rel: f64) {
    let mut sc = preset("ring-point").unwrap();
    sc.integrator = IntegratorSettings {
        t_end,
        sample_stride: stride,
        rtol: 1e-12,
        atol: 1e-13,
        ..sc.integrator
    };
    let traj = integrate(&sc.problem()).unwrap();
    assert!(traj.termination.is_completed());
    let mut worst: f64 = 0.0;
    for w in traj.samples.windows(3) {
        let fd = (w[2].h - w[0].h) / (2.0 * stride);
        let exact = w[1].hdot.unwrap();
        worst = worst.max((fd - exact).abs() / exact.abs());
    }
    assert!(worst <= rel, "stride {stride}: worst relative gap {worst:e}");
}

#[test]
fn hdot_matches_central_differences() {
    hdot_against_differences(1e-2, 20.0, 1e-3);
    hdot_against_differences(1e-3, 2.0, 1e-4);
}
