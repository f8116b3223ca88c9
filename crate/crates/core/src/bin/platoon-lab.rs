use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use platoon_lab::lab::{
    load_scenario, simulate, sweep, verify, write_sweep_csv, Axis, LabError, LabResult, Overrides, PRESET_NAMES,
};
use platoon_lab::sim::Method;

#[derive(Parser)]
#[command(
    name = "platoon-lab",
    version,
    about = "Simulate and verify bidirectional platoon controllers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for CSV, chart and report files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output grid stride in seconds.
    #[arg(long)]
    stride: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// rk45-adaptive or rk4-fixed.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            sample_stride: self.stride,
            t_end: self.t_end,
            method: self.method,
            rtol: self.rtol,
            atol: self.atol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or preset and emit its outputs.
    Simulate {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario and check its thresholds; exits 1 on any failure.
    Verify {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Vary one parameter of a scenario.
    Sweep {
        scenario: String,
        /// mu, lambda, q, n, R or d.
        #[arg(long)]
        axis: Axis,
        /// Comma-separated values; may be empty.
        #[arg(long, default_value = "")]
        values: String,
        #[command(flatten)]
        common: Common,
    },
    /// List or print built-in presets.
    Preset {
        #[arg(long)]
        list: bool,
        /// Print this preset as a scenario file.
        name: Option<String>,
    },
}

fn load(source: &str, common: &Common) -> LabResult<platoon_lab::lab::Scenario> {
    let mut scenario = load_scenario(source)?;
    common.overrides().apply(&mut scenario);
    scenario.validate()?;
    Ok(scenario)
}

fn parse_values(list: &str) -> LabResult<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| LabError::Invalid(format!("sweep value {v:?} is not a number")))
        })
        .collect()
}

fn run(cli: Cli) -> LabResult<u8> {
    match cli.command {
        Command::Simulate { scenario, common } => {
            let sc = load(&scenario, &common)?;
            let run = simulate(&sc, common.out_dir.as_deref())?;
            if !common.quiet {
                print!("{}", run.report.summary());
            }
            if !run.report.termination.is_completed() {
                return Err(LabError::Integration(run.report.termination.to_string()));
            }
            Ok(0)
        }
        Command::Verify { scenario, common } => {
            let sc = load(&scenario, &common)?;
            let v = verify(&sc, common.out_dir.as_deref())?;
            if !common.quiet || !v.passed() {
                print!("{}", v.table());
            }
            Ok(if v.passed() { 0 } else { 1 })
        }
        Command::Sweep {
            scenario,
            axis,
            values,
            common,
        } => {
            let values = parse_values(&values)?;
            let sc = load(&scenario, &common)?;
            let rows = sweep(&sc, axis, &values, common.out_dir.as_deref());
            if let Some(dir) = &common.out_dir {
                std::fs::create_dir_all(dir).map_err(|e| LabError::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                write_sweep_csv(&dir.join("sweep.csv"), axis, &rows)?;
            }
            if !common.quiet {
                println!(
                    "{:>10}  {:>12}  {:>10}  {:>10}  monitors",
                    axis.name(),
                    "conv. time",
                    "slope",
                    "max |F|"
                );
                for r in &rows {
                    match &r.outcome {
                        Ok(s) => println!(
                            "{:>10}  {:>12}  {:>10}  {:>10.5}  {}",
                            r.value,
                            s.convergence_time.map_or("-".into(), |t| format!("{t:.2}")),
                            s.decay.map_or("-".into(), |f| format!("{:.5}", f.slope)),
                            s.max_abs_accel,
                            if s.monitors_passed { "pass" } else { "FAIL" }
                        ),
                        Err(e) => println!("{:>10}  error: {e}", r.value),
                    }
                }
            }
            Ok(0)
        }
        Command::Preset { list, name } => {
            match name {
                Some(name) => print!("{}", platoon_lab::lab::preset(&name)?.to_toml()?),
                None if list => PRESET_NAMES.iter().for_each(|n| println!("{n}")),
                None => {
                    return Err(LabError::Invalid("give --list or a preset name".into()));
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
