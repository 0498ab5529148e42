//! Generalized spectra of `(A, B)` for each mass treatment, with optional deflated curves.

use super::{num, Out};
use crate::config::{Config, DeflationSpec, EigenSource, Operator, SpectrumMethod};
use crate::error::CliResult;
use crate::plot::{Plot, Scale};
use crate::problem::{dense_spectrum, top_pairs, Problem};
use iga_lumping::assembly::jacobi_rescale;
use iga_lumping::linalg::{dense_generalized_eigvals, SparseMatrix};
use iga_lumping::spectral::{cfl_gain, deflate, dense_top_pairs, split_zero_modes, write_spectrum_csv, DeflationMode, ZERO_MODE_THRESHOLD};
use std::io::Write;

/// Tolerance of Lanczos-only spectra.
const LANCZOS_TOL: f64 = 1e-8;

/// One labelled curve: 1-based eigenvalue indices with their values.
struct Curve {
    label: String,
    first_index: usize,
    values: Vec<f64>,
}

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let problem = Problem::build(cfg, &cfg.subdivisions, cfg.trim.as_ref().map(|t| (t, t.angle)))?;
    let n = problem.ndofs();
    let spec = &cfg.spectrum;
    let max_restarts = cfg.deflation.as_ref().map_or(500, |d| d.max_restarts);
    let mut curves = Vec::new();
    let mut summary = Vec::new();
    let mut deflation_rows = Vec::new();
    let mut report = vec![format!("{n} dofs")];

    for &lumping in &cfg.masses {
        let label = lumping.label();
        let b = problem.mass(lumping)?;
        let a = match spec.operator {
            Operator::Stiffness => problem.stiffness().clone(),
            Operator::Mass => problem.consistent().clone(),
        };
        let (a, b) = if spec.jacobi { let (a, b, _) = jacobi_rescale(&a, &b)?; (a, b) } else { (a, b) };
        let curve = match spec.method {
            SpectrumMethod::Dense => {
                let (zeros, rest) = split_zero_modes(&dense_spectrum(&a, &b, false)?, ZERO_MODE_THRESHOLD);
                Curve { label: label.clone(), first_index: zeros.len() + 1, values: rest }
            }
            SpectrumMethod::Lanczos => {
                let count = spec.count.min(n);
                let res = top_pairs(&a, &b, count, LANCZOS_TOL, max_restarts, cfg.seed)?;
                let mut values = res.pairs.values.clone();
                values.sort_by(f64::total_cmp);
                Curve { label: label.clone(), first_index: n - count + 1, values }
            }
        };
        let zero_modes = match spec.method {
            SpectrumMethod::Dense => (curve.first_index - 1).to_string(),
            SpectrumMethod::Lanczos => String::new(),
        };
        let (lo, hi) = (curve.values[0], curve.values[curve.values.len() - 1]);
        report.push(format!("{label}: lambda in [{lo:.6e}, {hi:.6e}]"));
        summary.push(vec![label.clone(), n.to_string(), zero_modes, num(lo), num(hi)]);
        curves.push(curve);

        if let Some(def) = &cfg.deflation {
            for &r in &def.ranks {
                let (row, gain, scaled) = deflated(&a, &b, r, def, spec.method, cfg.seed)?;
                report.push(format!("{label} rank {r}: CFL gain {gain:.4}"));
                let mut full = vec![label.clone()];
                full.extend(row);
                deflation_rows.push(full);
                if let Some(values) = scaled {
                    let (zeros, rest) = split_zero_modes(&values, ZERO_MODE_THRESHOLD);
                    curves.push(Curve { label: format!("{label}-r{r}"), first_index: zeros.len() + 1, values: rest });
                }
            }
        }
    }

    let mut w = out.file("spectrum.csv")?;
    if curves.iter().all(|c| c.first_index == 1) {
        let spectra: Vec<(String, Vec<f64>)> = curves.iter().map(|c| (c.label.clone(), c.values.clone())).collect();
        write_spectrum_csv(&mut w, &spectra)?;
    } else {
        writeln!(w, "k,lambda,pencil")?;
        for c in &curves {
            for (j, v) in c.values.iter().enumerate() {
                writeln!(w, "{},{v:.16e},{}", c.first_index + j, c.label)?;
            }
        }
    }
    w.flush()?;
    out.csv("spectrum_summary.csv", &["pencil", "n", "zero_modes", "lambda_min", "lambda_max"], &summary)?;
    let mut files = vec!["spectrum.csv", "spectrum_summary.csv"];
    if !deflation_rows.is_empty() {
        out.csv(
            "deflation.csv",
            &["pencil", "rank", "mode", "lambda_max", "lambda_cut", "cfl_gain", "eigen_iterations"],
            &deflation_rows,
        )?;
        files.push("deflation.csv");
    }

    let y_scale = match spec.operator {
        Operator::Stiffness => Scale::Log,
        Operator::Mass => Scale::Linear,
    };
    let mut plot = Plot::new("Generalized eigenvalues", "k", "lambda_k", Scale::Linear, y_scale);
    for c in &curves {
        let pts = c.values.iter().enumerate().map(|(j, v)| ((c.first_index + j) as f64, *v)).collect();
        plot = plot.series(&c.label, pts, false);
    }
    out.text("spectrum.svg", &plot.to_svg())?;
    files.push("spectrum.svg");
    report.push(format!("wrote {}", files.join(", ")));
    Ok(report)
}

/// Deflate the top `r` eigenvalues; returns the table row (without the pencil label), the
/// CFL gain and, for the dense method, the full spectrum of the deflated pencil.
fn deflated(
    a: &SparseMatrix,
    b: &SparseMatrix,
    r: usize,
    def: &DeflationSpec,
    method: SpectrumMethod,
    seed: u64,
) -> CliResult<(Vec<String>, f64, Option<Vec<f64>>)> {
    let (pairs, iterations) = match def.source {
        EigenSource::Dense => (dense_top_pairs(a, b, r + 1)?, 0),
        EigenSource::Lanczos => {
            let res = top_pairs(a, b, r + 1, def.tol, def.max_restarts, seed)?;
            (res.pairs, res.iterations)
        }
    };
    let pencil = deflate(a, b, r, def.mode, &pairs)?;
    let lambda_n = pairs.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gain = cfl_gain(lambda_n, pencil.lambda_cut)?;
    let mode = match def.mode {
        DeflationMode::ScaleMass => "mass",
        DeflationMode::ScaleStiffness => "stiffness",
    };
    let row = vec![r.to_string(), mode.into(), num(lambda_n), num(pencil.lambda_cut), num(gain), iterations.to_string()];
    let scaled = match method {
        SpectrumMethod::Dense => Some(dense_generalized_eigvals(&pencil.dense_stiffness(), &pencil.dense_mass())?),
        SpectrumMethod::Lanczos => None,
    };
    Ok((row, gain, scaled))
}
