//! Plot-ready CSV exports of report sections.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::report::RunReport;
use crate::CliError;

/// Exportable report sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsvKind {
    /// One row per orbit: `action,residual,degenerate,kernel_dim,x0_0,…`.
    Orbits,
    /// One row per recorded flow step: `t,action,norm`.
    Trajectory,
}

/// Writes the requested section as CSV into `dir`; errors when the report
/// does not contain the data.
pub fn export_csv(report: &RunReport, kind: CsvKind, dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let (name, body) = match kind {
        CsvKind::Orbits => ("orbits.csv", orbits_csv(report)?),
        CsvKind::Trajectory => ("trajectory.csv", trajectory_csv(report)?),
    };
    let path = dir.join(name);
    std::fs::write(&path, body)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Writes every exportable section present in the report.
pub fn export_available(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if report.orbits.is_some() {
        written.push(export_csv(report, CsvKind::Orbits, dir)?);
    }
    if report.trajectory.is_some() {
        written.push(export_csv(report, CsvKind::Trajectory, dir)?);
    }
    Ok(written)
}

fn orbits_csv(report: &RunReport) -> Result<String, CliError> {
    let section = report
        .orbits
        .as_ref()
        .ok_or_else(|| CliError::Usage("report has no orbit data to export".into()))?;
    let dim = section.orbit.first().map(|o| o.x0.len()).unwrap_or(0);
    let mut out = String::from("action,residual,degenerate,kernel_dim,period_gap");
    for i in 0..dim {
        let _ = write!(out, ",x0_{i}");
    }
    out.push('\n');
    for orbit in &section.orbit {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            orbit.action,
            orbit.residual,
            orbit.degenerate,
            orbit.kernel_dim,
            orbit.period_gap.unwrap_or(f64::NAN)
        );
        for c in &orbit.x0 {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    Ok(out)
}

fn trajectory_csv(report: &RunReport) -> Result<String, CliError> {
    let section = report
        .trajectory
        .as_ref()
        .ok_or_else(|| CliError::Usage("report has no trajectory data to export".into()))?;
    let mut out = String::from("t,action,norm\n");
    for (t, action, norm) in &section.samples {
        let _ = writeln!(out, "{t},{action},{norm}");
    }
    Ok(out)
}
