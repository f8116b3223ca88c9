//! Scenario files, presets, CSV and chart emission, verification and sweeps.

mod error;
mod output;
pub mod presets;
mod run;
mod scenario;
mod svg;
mod sweep;
mod verify;

pub use error::{LabError, LabResult};
pub use output::{trajectory_header, write_trajectory_csv};
pub use presets::{preset, PRESET_NAMES};
pub use run::{run_scenario, simulate, Run, RunReport};
pub use scenario::{load_scenario, Overrides, Scenario, Thresholds};
pub use svg::{LineChart, Series};
pub use sweep::{sweep, sweep_scenario, write_sweep_csv, Axis, RowSummary, SweepRow, SWEEP_HEADER};
pub use verify::{verify, Check, Verification};
