//! Central difference runs for each mass treatment, at the common consistent-mass step
//! and at each treatment's own critical step.

use super::{num, Out};
use crate::config::{Config, Initial, SimProblem};
use crate::error::CliResult;
use crate::plot::{Plot, Scale};
use crate::problem::{lambda_max, single_space, Problem};
use iga_lumping::dynamics::{central_difference, l2_error, manufactured_wave_problem, step_count, write_trajectory_csv, ManufacturedWave, Trajectory};
use iga_lumping::geometry::{catalog, Patch};
use iga_lumping::linalg::{BandedCholesky, SparseMatrix};
use iga_lumping::spectral::critical_timestep;
use iga_lumping::spline::SplineSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Matrices and data of the time-dependent problem.
struct Setup {
    k: SparseMatrix,
    consistent: SparseMatrix,
    masses: Vec<SparseMatrix>,
    u0: Vec<f64>,
    v0: Vec<f64>,
    force: Option<Box<dyn Fn(f64) -> Vec<f64> + Sync>>,
    /// Space and patch for L2 errors against the exact solution.
    exact: Option<(SplineSpace, Patch)>,
}

fn setup(cfg: &Config) -> CliResult<Setup> {
    let sim = cfg.simulate.as_ref().expect("validated");
    match sim.problem {
        SimProblem::Manufactured => {
            let space = single_space(cfg, &cfg.subdivisions)?;
            let patch = catalog::plate_with_hole();
            let wp = manufactured_wave_problem(&space, &patch)?;
            let masses = cfg.masses.iter().map(|&l| wp.pair.lumped_mass(l)).collect::<Result<Vec<_>, _>>()?;
            let (k, consistent) = (wp.pair.k.matrix().clone(), wp.pair.m.matrix().clone());
            let (u0, v0) = (wp.u0.clone(), wp.v0.clone());
            Ok(Setup { k, consistent, masses, u0, v0, force: Some(Box::new(move |t| wp.force(t))), exact: Some((space, patch)) })
        }
        SimProblem::Free => {
            let p = Problem::build(cfg, &cfg.subdivisions, cfg.trim.as_ref().map(|t| (t, t.angle)))?;
            let masses = cfg.masses.iter().map(|&l| p.mass(l)).collect::<CliResult<Vec<_>>>()?;
            let n = p.ndofs();
            let u0 = match sim.initial {
                Initial::Zero => vec![0.0; n],
                Initial::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
                }
            };
            Ok(Setup { k: p.stiffness().clone(), consistent: p.consistent().clone(), masses, u0, v0: vec![0.0; n], force: None, exact: None })
        }
    }
}

/// One run: the trajectory plus `(t, absolute, relative)` L2 errors at the stored samples.
struct Run {
    traj: Trajectory,
    errors: Vec<(f64, f64, f64)>,
}

fn integrate(s: &Setup, chol: &BandedCholesky, dt: f64, t_end: f64, samples: usize) -> CliResult<Run> {
    let store_every = (step_count(t_end, dt) / samples).max(1);
    let force = s.force.as_ref().map(|f| f.as_ref() as &(dyn Fn(f64) -> Vec<f64> + Sync));
    let traj = central_difference(chol, &s.k, force, &s.u0, &s.v0, dt, t_end, store_every)?;
    let mut errors = Vec::new();
    if let Some((space, patch)) = &s.exact {
        let zero = vec![0.0; s.u0.len()];
        for (step, u) in &traj.samples {
            let t = *step as f64 * dt;
            let e = l2_error(space, patch, u, &ManufacturedWave::exact, t)?;
            let norm = l2_error(space, patch, &zero, &ManufacturedWave::exact, t)?;
            errors.push((t, e, e / norm));
        }
    }
    Ok(Run { traj, errors })
}

fn write_run(out: &Out, name: &str, run: &Run) -> CliResult<()> {
    let mut w = out.file(name)?;
    let abs: Vec<(f64, f64)> = run.errors.iter().map(|&(t, e, _)| (t, e)).collect();
    write_trajectory_csv(&mut w, &run.traj, (!abs.is_empty()).then_some(abs.as_slice()))?;
    Ok(())
}

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let sim = cfg.simulate.as_ref().expect("validated");
    let s = setup(cfg)?;
    let dt_common = sim.safeguard * critical_timestep(lambda_max(&s.k, &s.consistent, cfg.seed)?)?;

    let results = s
        .masses
        .par_iter()
        .map(|b| {
            let chol = BandedCholesky::factor(b, None)?;
            let lmax = lambda_max(&s.k, b, cfg.seed)?;
            let dt = sim.safeguard * critical_timestep(lmax)?;
            let common = integrate(&s, &chol, dt_common, sim.t_end, sim.samples)?;
            let own = integrate(&s, &chol, dt, sim.t_end, sim.samples)?;
            Ok((lmax, dt, common, own))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut summary = Vec::new();
    let mut report = vec![format!("common step {dt_common:.6e}")];
    let (title, y_label, y_scale) = match s.exact {
        Some(_) => ("Relative L2 error at the common step", "relative L2 error", Scale::Log),
        None => ("Coefficient norm at the common step", "|u|", Scale::Linear),
    };
    let mut plot = Plot::new(title, "t", y_label, Scale::Linear, y_scale);
    for (&lumping, (lmax, dt, common, own)) in cfg.masses.iter().zip(&results) {
        let label = lumping.label();
        write_run(out, &format!("trajectory_{label}.csv"), common)?;
        write_run(out, &format!("trajectory_{label}_critical.csv"), own)?;
        let last_rel = |r: &Run| r.errors.last().map_or_else(String::new, |e| num(e.2));
        summary.push(vec![
            label.clone(),
            num(*lmax),
            num(*dt),
            num(dt_common),
            (common.traj.times.len() - 1).to_string(),
            (own.traj.times.len() - 1).to_string(),
            common.traj.stable.to_string(),
            own.traj.stable.to_string(),
            last_rel(common),
            last_rel(own),
        ]);
        report.push(format!(
            "{label}: critical step {dt:.6e}, {} steps{}",
            own.traj.times.len() - 1,
            common.errors.last().map_or_else(String::new, |e| format!(", final relative error {:.3e} at the common step", e.2))
        ));
        let pts = match s.exact {
            Some(_) => common.errors.iter().map(|&(t, _, r)| (t, r)).collect(),
            None => common.traj.times.iter().copied().zip(common.traj.norms.iter().copied()).collect(),
        };
        plot = plot.series(&label, pts, false);
    }
    out.csv(
        "summary.csv",
        &[
            "pencil",
            "lambda_max",
            "dt_critical",
            "dt_common",
            "steps_common",
            "steps_critical",
            "stable_common",
            "stable_critical",
            "final_rel_error_common",
            "final_rel_error_critical",
        ],
        &summary,
    )?;
    out.text("error.svg", &plot.to_svg())?;
    report.push("wrote trajectory_*.csv, summary.csv, error.svg".into());
    Ok(report)
}
