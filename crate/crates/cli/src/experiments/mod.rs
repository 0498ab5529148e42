//! Experiment runners. Each writes CSV tables plus an SVG plot into the output directory
//! and returns a short report for the terminal.

mod bandwidth;
mod convergence;
mod ratio;
mod simulate;
mod spectrum;
mod trimmed;

use crate::config::{Config, ExperimentKind};
use crate::error::CliResult;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Run the configured experiment, writing into `dir`.
pub fn run(cfg: &Config, dir: &Path) -> CliResult<Vec<String>> {
    let out = Out::new(dir)?;
    match cfg.kind {
        ExperimentKind::Spectrum => spectrum::run(cfg, &out),
        ExperimentKind::Convergence => convergence::run(cfg, &out),
        ExperimentKind::Simulate => simulate::run(cfg, &out),
        ExperimentKind::DeflateRatio => ratio::run(cfg, &out),
        ExperimentKind::TrimmedSweep => trimmed::run(cfg, &out),
        ExperimentKind::BandwidthReport => bandwidth::run(cfg, &out),
    }
}

/// Output directory of one run.
pub struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Out { dir: dir.to_path_buf() })
    }

    pub fn file(&self, name: &str) -> CliResult<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    pub fn text(&self, name: &str, contents: &str) -> CliResult<()> {
        let mut w = self.file(name)?;
        w.write_all(contents.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Write a CSV table with the given header.
    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(self.file(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed float format used in every table.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Least-squares slope of `log |err|` against `log h`, ignoring zero errors.
pub fn fitted_slope(h: &[f64], err: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h.iter().zip(err).filter(|(_, e)| e.abs() > 0.0).map(|(h, e)| (h.ln(), e.abs().ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}
