//! CSV emission. Numbers use shortest round-trip formatting, so equal runs
//! give byte-identical files.

use std::path::Path;

use crate::lab::{LabError, LabResult};
use crate::model::{ControlLaw, ExtendedSpacings};
use crate::sim::{has_u, Problem, Sample, Trajectory};

fn indexed(prefix: &str, range: std::ops::RangeInclusive<usize>) -> impl Iterator<Item = String> + '_ {
    range.map(move |i| format!("{prefix}_{i}"))
}

/// Spacing column names: the ring includes its closing gap `s_1`.
pub(crate) fn spacing_names(problem: &Problem) -> Vec<String> {
    let n = problem.n();
    let first = if problem.topology.is_ring() { 1 } else { 2 };
    indexed("s", first..=n).collect()
}

/// Spacing values matching [`spacing_names`].
pub(crate) fn spacing_values(problem: &Problem, sample: &Sample) -> Vec<f64> {
    if problem.topology.is_ring() {
        ExtendedSpacings::new(&sample.state, &problem.topology).gaps().to_vec()
    } else {
        sample.state.spacings.clone()
    }
}

/// Trajectory CSV columns. They depend only on the topology, the law and
/// whether `U` exists, never on the data.
pub fn trajectory_header(problem: &Problem) -> Vec<String> {
    let n = problem.n();
    let mut cols = vec!["t".to_string()];
    cols.extend(spacing_names(problem));
    cols.extend(indexed("v", 1..=n));
    cols.extend(indexed("F", 1..=n));
    cols.push("H".into());
    if has_u(problem) {
        cols.push("U".into());
    }
    if problem.controller.law == ControlLaw::Bidirectional {
        cols.push("Hdot".into());
    }
    cols.push("min_spacing".into());
    cols
}

fn trajectory_row(problem: &Problem, s: &Sample) -> Vec<f64> {
    let mut row = vec![s.t];
    row.extend(spacing_values(problem, s));
    row.extend(&s.state.speeds);
    row.extend(&s.accel);
    row.push(s.h);
    if has_u(problem) {
        row.push(s.u.unwrap_or(f64::NAN));
    }
    if problem.controller.law == ControlLaw::Bidirectional {
        row.push(s.hdot.unwrap_or(f64::NAN));
    }
    row.push(s.min_spacing);
    row
}

pub fn write_trajectory_csv(path: &Path, trajectory: &Trajectory, problem: &Problem) -> LabResult<()> {
    write_table(
        path,
        &trajectory_header(problem),
        trajectory.samples.iter().map(|s| trajectory_row(problem, s)),
    )
}

/// Shortest round-trip text, in exponent form for very small or large magnitudes.
pub(crate) fn number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub(crate) fn write_table<I>(path: &Path, header: &[String], rows: I) -> LabResult<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let file = std::fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| number(v)))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}
