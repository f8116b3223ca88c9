//! Scenario files, CSV schema, sweeps and the command-line front end.

use std::path::Path;
use std::process::{Command, Output};

use platoon_lab::lab::{preset, sweep, trajectory_header, Axis, Scenario, PRESET_NAMES};
use platoon_lab::model::ControlLaw;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platoon-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_scenario(dir: &Path, name: &str, edit: impl FnOnce(&mut Scenario)) -> String {
    let mut sc = preset("ring-point").unwrap();
    sc.integrator.t_end = 20.0;
    edit(&mut sc);
    let path = dir.join(name);
    sc.save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn presets_round_trip_through_text() {
    for name in PRESET_NAMES {
        let sc = preset(name).unwrap();
        let text = sc.to_toml().unwrap();
        let back = Scenario::from_toml(&text).unwrap();
        assert_eq!(back, sc, "{name}");
        assert_eq!(back.to_toml().unwrap(), text, "{name}");
        assert_eq!(back.hash().unwrap(), sc.hash().unwrap());
    }
}

#[test]
fn csv_headers_depend_only_on_topology_and_law() {
    let header = |name: &str| trajectory_header(&preset(name).unwrap().problem()).join(",");
    assert_eq!(
        header("ring-point"),
        "t,s_1,s_2,s_3,s_4,v_1,v_2,v_3,v_4,F_1,F_2,F_3,F_4,H,U,Hdot,min_spacing"
    );
    assert_eq!(
        header("ring-continuum"),
        "t,s_1,s_2,s_3,s_4,v_1,v_2,v_3,v_4,F_1,F_2,F_3,F_4,H,Hdot,min_spacing"
    );
    assert_eq!(
        header("open-road-compare-48"),
        "t,s_2,s_3,s_4,s_5,v_1,v_2,v_3,v_4,v_5,F_1,F_2,F_3,F_4,F_5,H,Hdot,min_spacing"
    );
    assert_eq!(
        header("open-road-compare-73"),
        "t,s_2,s_3,s_4,s_5,v_1,v_2,v_3,v_4,v_5,F_1,F_2,F_3,F_4,F_5,H,min_spacing"
    );
    // Changing the initial state or horizon does not change the columns.
    let mut sc = preset("ring-point").unwrap();
    sc.initial = platoon_lab::model::PlatoonState::uniform(4, 32.5, 30.0);
    sc.integrator.t_end = 1.0;
    assert_eq!(trajectory_header(&sc.problem()).join(","), header("ring-point"));
    assert_eq!(
        preset("open-road-compare-73").unwrap().controller.law,
        ControlLaw::Baseline {
            mu_tilde: 0.1,
            epsilon: 0.1
        }
    );
}

#[test]
fn mu_sweep_slopes_steepen() {
    let sc = preset("ring-point").unwrap();
    let rows = sweep(&sc, Axis::Mu, &[0.05, 0.1, 0.2], None);
    let slopes: Vec<f64> = rows
        .iter()
        .map(|r| r.outcome.as_ref().unwrap().decay.unwrap().slope)
        .collect();
    assert!(slopes.windows(2).all(|w| w[1].abs() >= w[0].abs()), "{slopes:?}");
    assert!(sweep(&sc, Axis::Mu, &[], None).is_empty());
}

#[test]
fn preset_listing() {
    let out = lab(&["preset", "--list"]);
    assert_eq!(code(&out), 0);
    let listed: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(listed, PRESET_NAMES);
    let out = lab(&["preset", "string-stability"]);
    assert_eq!(code(&out), 0);
    let sc = Scenario::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(sc.disturbance.unwrap().amplitude, 14.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();

    let out = lab(&["verify", "ring-point", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));

    let impossible = write_scenario(dir.path(), "impossible.toml", |sc| {
        sc.thresholds.convergence_time = Some(0.0)
    });
    let out = lab(&["verify", &impossible, "--quiet"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    assert_eq!(code(&lab(&["simulate", "no-such-preset"])), 2);
    assert_eq!(code(&lab(&["simulate", "ring-point", "--method", "euler"])), 2);
    assert_eq!(code(&lab(&["simulate", "ring-point", "--t-end", "-1"])), 2);
    std::fs::write(dir.path().join("broken.toml"), "name = 3\n").unwrap();
    assert_eq!(
        code(&lab(&["verify", dir.path().join("broken.toml").to_str().unwrap()])),
        2
    );

    let stuck = write_scenario(dir.path(), "stuck.toml", |sc| {
        sc.integrator.dt_min = 1.0;
        sc.integrator.dt_init = 2.0;
        sc.integrator.dt_max = 2.0;
        sc.integrator.rtol = 1e-14;
        sc.integrator.atol = 1e-14;
    });
    assert_eq!(code(&lab(&["simulate", &stuck, "--quiet"])), 3);
    assert_eq!(code(&lab(&["verify", &stuck, "--quiet"])), 3);

    let out = lab(&[
        "simulate",
        "ring-point",
        "--t-end",
        "5",
        "--quiet",
        "--out-dir",
        out_dir,
    ]);
    assert_eq!(code(&out), 0);
    assert!(Path::new(out_dir).join("trajectory.csv").is_file());
}

#[test]
fn sweeps_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "sweep",
        "ring-point",
        "--axis",
        "mu",
        "--values",
        "",
        "--quiet",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("mu,"));

    let out = lab(&["sweep", "ring-point", "--axis", "n", "--values", "3,5", "--t-end", "30"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    assert_eq!(
        code(&lab(&["sweep", "ring-point", "--axis", "zeta", "--values", "1"])),
        2
    );
    assert_eq!(
        code(&lab(&["sweep", "ring-point", "--axis", "mu", "--values", "0.1,x"])),
        2
    );
    assert_eq!(code(&lab(&["sweep", "ring-point", "--axis", "mu", "--quiet"])), 0);
}
