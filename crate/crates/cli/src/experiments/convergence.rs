//! Relative error of the first eigenfrequency under mesh refinement.

use super::{fitted_slope, num, Out};
use crate::config::{Config, Reference};
use crate::error::CliResult;
use crate::plot::{Plot, Scale};
use crate::problem::Problem;
use iga_lumping::lumping::Lumping;
use iga_lumping::spectral::smallest_eigenvalue;
use rayon::prelude::*;
use std::f64::consts::PI;

const EIG_TOL: f64 = 1e-14;
const EIG_MAX_ITER: usize = 100_000;

/// First frequency `sqrt(l_1)` of `(K, B)` on an `n^d` mesh.
fn first_frequency(cfg: &Config, n: usize, lumping: Lumping) -> CliResult<f64> {
    let p = Problem::build(cfg, &vec![n; cfg.geometry.dim()], None)?;
    let b = p.mass(lumping)?;
    Ok(smallest_eigenvalue(p.stiffness(), &b, EIG_TOL, EIG_MAX_ITER)?.sqrt())
}

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let conv = cfg.convergence.as_ref().expect("validated");
    let d = cfg.geometry.dim();
    let (omega_ref, ref_label, ref_n) = match conv.reference {
        Reference::Exact => (PI * (d as f64).sqrt(), "exact", None),
        Reference::Fine(levels) => {
            let n = conv.levels[conv.levels.len() - 1] << levels;
            (first_frequency(cfg, n, Lumping::Consistent)?, "fine", Some(n))
        }
    };
    let jobs: Vec<(usize, Lumping)> = conv.levels.iter().flat_map(|&n| cfg.masses.iter().map(move |&l| (n, l))).collect();
    let omegas = jobs.par_iter().map(|&(n, l)| first_frequency(cfg, n, l)).collect::<CliResult<Vec<f64>>>()?;

    let mut rows = Vec::new();
    let mut plot = Plot::new("Relative error of the first eigenfrequency", "h", "|omega_1 - omega_h1| / omega_1", Scale::Log, Scale::Log);
    let mut slopes = Vec::new();
    let mut report = vec![format!("reference omega_1 = {omega_ref:.12e} ({ref_label})")];
    for (m, &lumping) in cfg.masses.iter().enumerate() {
        let label = lumping.label();
        let mut h = Vec::new();
        let mut err = Vec::new();
        for (i, &n) in conv.levels.iter().enumerate() {
            let omega = omegas[i * cfg.masses.len() + m];
            let e = (omega_ref - omega) / omega_ref;
            rows.push(vec![n.to_string(), num(1.0 / n as f64), label.clone(), num(omega), num(e)]);
            h.push(1.0 / n as f64);
            err.push(e);
        }
        let slope = fitted_slope(&h, &err);
        let text = slope.map_or_else(String::new, num);
        report.push(format!("{label}: fitted slope {}", slope.map_or("n/a".into(), |s| format!("{s:.3}"))));
        slopes.push(vec![label.clone(), text]);
        plot = plot.series(&label, h.iter().zip(&err).map(|(h, e)| (*h, e.abs())).collect(), true);
    }
    out.csv("convergence.csv", &["n", "h", "pencil", "omega_h", "rel_error"], &rows)?;
    out.csv("slopes.csv", &["pencil", "slope"], &slopes)?;
    out.csv(
        "reference.csv",
        &["reference", "n", "omega_1"],
        &[vec![ref_label.into(), ref_n.map_or_else(String::new, |n| n.to_string()), num(omega_ref)]],
    )?;
    out.text("convergence.svg", &plot.to_svg())?;
    report.push("wrote convergence.csv, slopes.csv, reference.csv, convergence.svg".into());
    Ok(report)
}
