//! Result files: CSV with a header naming columns and units, JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{Metrics, SweepRow, Trace};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Write any serializable rows as CSV; the header comes from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    metrics: &'a Metrics,
    converged: bool,
    final_x_m: f64,
    final_y_m: f64,
    final_heading_rad: f64,
    final_sigma_rad: f64,
    final_p_sigma: f64,
}

/// Files written by a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationFiles {
    pub trace: PathBuf,
    pub summary: PathBuf,
    pub trajectory: Option<PathBuf>,
}

/// `trace.csv`, `summary.json` and, when sampled, `trajectory.csv` under `dir`.
pub fn write_simulation(dir: &Path, trace: &Trace, metrics: &Metrics) -> Result<SimulationFiles> {
    fs::create_dir_all(dir)?;
    let files = SimulationFiles {
        trace: dir.join("trace.csv"),
        summary: dir.join("summary.json"),
        trajectory: (!trace.trajectory.is_empty()).then(|| dir.join("trajectory.csv")),
    };
    write_csv(&files.trace, &trace.records)?;
    if let Some(p) = &files.trajectory {
        write_csv(p, &trace.trajectory)?;
    }
    let summary = Summary {
        metrics,
        converged: metrics.stances_to_converge.is_some(),
        final_x_m: trace.final_state.r.x,
        final_y_m: trace.final_state.r.y,
        final_heading_rad: trace.final_state.heading,
        final_sigma_rad: trace.final_body.sigma,
        final_p_sigma: trace.final_body.p_sigma,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&files.summary, json + "\n")?;
    Ok(files)
}

/// `sweep.csv` with one row per grid point.
pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("sweep.csv");
    write_csv(&path, rows)?;
    Ok(path)
}
