//! Spectra of a rotated trimmed square over uniformly spaced rotation angles.

use super::{num, Out};
use crate::config::Config;
use crate::error::CliResult;
use crate::plot::{Plot, Scale};
use crate::problem::{dense_spectrum, Problem};
use iga_lumping::spectral::{split_zero_modes, write_spectrum_csv, ZERO_MODE_THRESHOLD};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Spectra at one angle: dof count and per treatment (label, zero modes, nonzero eigenvalues).
type AngleResult = (usize, Vec<(String, usize, Vec<f64>)>);

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let trim = cfg.trim.as_ref().expect("validated");
    let angles: Vec<f64> = (0..trim.angles).map(|j| 2.0 * PI * j as f64 / trim.angles as f64).collect();
    let results = angles
        .par_iter()
        .map(|&angle| -> CliResult<AngleResult> {
            let p = Problem::build(cfg, &cfg.subdivisions, Some((trim, angle)))?;
            let mut spectra = Vec::new();
            for &l in &cfg.masses {
                let values = dense_spectrum(p.stiffness(), &p.mass(l)?, cfg.spectrum.jacobi)?;
                let (zeros, rest) = split_zero_modes(&values, ZERO_MODE_THRESHOLD);
                spectra.push((l.label(), zeros.len(), rest));
            }
            Ok((p.ndofs(), spectra))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let width = (trim.angles - 1).to_string().len().max(2);
    let mut summary = Vec::new();
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.masses.len()];
    for (j, (&angle, (n, spectra))) in angles.iter().zip(&results).enumerate() {
        let labelled: Vec<(String, Vec<f64>)> = spectra.iter().map(|(l, _, v)| (l.clone(), v.clone())).collect();
        write_spectrum_csv(out.file(&format!("angle_{j:0width$}.csv"))?, &labelled)?;
        for (m, (label, zeros, values)) in spectra.iter().enumerate() {
            let hi = values.last().copied().unwrap_or(f64::NAN);
            summary.push(vec![j.to_string(), num(angle), n.to_string(), label.clone(), zeros.to_string(), num(values[0]), num(hi)]);
            curves[m].push((angle, hi));
        }
    }
    out.csv("summary.csv", &["angle_index", "angle", "n", "pencil", "zero_modes", "lambda_min", "lambda_max"], &summary)?;
    let mut plot = Plot::new("Largest eigenvalue of the trimmed square", "rotation angle", "lambda_max", Scale::Linear, Scale::Log);
    let mut report = Vec::new();
    for (&l, pts) in cfg.masses.iter().zip(curves) {
        let worst = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        report.push(format!("{}: largest lambda_max over {} angles {worst:.6e}", l.label(), trim.angles));
        plot = plot.series(&l.label(), pts, true);
    }
    out.text("sweep.svg", &plot.to_svg())?;
    report.push(format!("wrote angle_*.csv ({} files), summary.csv, sweep.svg", trim.angles));
    Ok(report)
}
