//! Cost ratio of deflated against plain explicit runs as the simulated time grows.

use super::{num, Out};
use crate::config::{Config, EigenSource};
use crate::error::CliResult;
use crate::plot::{Plot, Scale};
use crate::problem::{top_pairs, Problem};
use iga_lumping::dynamics::{iteration_ratio, steps_to_reach};
use iga_lumping::spectral::{cfl_gain, critical_timestep, dense_top_pairs};
use rayon::prelude::*;

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let def = cfg.deflation.as_ref().expect("validated");
    let ratio = &cfg.ratio;
    let problem = Problem::build(cfg, &cfg.subdivisions, cfg.trim.as_ref().map(|t| (t, t.angle)))?;
    let lumping = cfg.masses[0];
    let (k, b) = (problem.stiffness(), problem.mass(lumping)?);

    let eig = def
        .ranks
        .par_iter()
        .map(|&r| match def.source {
            EigenSource::Dense => Ok((dense_top_pairs(k, &b, r + 1)?.values, 0, 0)),
            EigenSource::Lanczos => {
                let res = top_pairs(k, &b, r + 1, def.tol, def.max_restarts, cfg.seed)?;
                Ok((res.pairs.values, res.iterations, res.restarts))
            }
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut report = vec![format!("{} dofs, mass {}", problem.ndofs(), lumping.label())];
    let mut plot = Plot::new("Deflated over plain iteration count", "T", "(N_s + N_i) / N_w", Scale::Log, Scale::Log).hline(1.0);
    for (&r, (values, iterations, restarts)) in def.ranks.iter().zip(&eig) {
        let mut desc = values.clone();
        desc.sort_by(|x, y| y.total_cmp(x));
        let dt_plain = ratio.safeguard * critical_timestep(desc[0])?;
        let dt_scaled = ratio.safeguard * critical_timestep(desc[r])?;
        let mut pts = Vec::new();
        for j in 0..ratio.points {
            let t = dt_plain * ratio.growth.powi(j as i32);
            let (nw, ns) = (steps_to_reach(t, dt_plain), steps_to_reach(t, dt_scaled));
            let q = iteration_ratio(ns, *iterations, nw)?;
            rows.push(vec![r.to_string(), num(t), nw.to_string(), ns.to_string(), iterations.to_string(), num(q)]);
            pts.push((t, q));
        }
        let gain = cfl_gain(desc[0], desc[r])?;
        summary.push(vec![r.to_string(), num(desc[0]), num(desc[r]), num(gain), iterations.to_string(), restarts.to_string()]);
        report.push(format!(
            "rank {r}: CFL gain {gain:.4}, {iterations} eigensolver iterations, ratio {:.3} -> {:.3}",
            pts[0].1,
            pts[pts.len() - 1].1
        ));
        plot = plot.series(&format!("r = {r}"), pts, true);
    }
    out.csv("ratio.csv", &["rank", "t_end", "steps_plain", "steps_scaled", "eigen_iterations", "ratio"], &rows)?;
    out.csv("ratio_summary.csv", &["rank", "lambda_max", "lambda_cut", "cfl_gain", "eigen_iterations", "restarts"], &summary)?;
    out.text("ratio.svg", &plot.to_svg())?;
    report.push("wrote ratio.csv, ratio_summary.csv, ratio.svg".into());
    Ok(report)
}
