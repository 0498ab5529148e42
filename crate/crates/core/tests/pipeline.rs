//! End-to-end flows across modules.

use iga_lumping::assembly::{assemble_multipatch, assemble_single_patch, read_triplets, write_triplets};
use iga_lumping::dynamics::{central_difference, is_stable, l2_error, manufactured_wave_problem, ManufacturedWave};
use iga_lumping::geometry::{catalog, read_topology, write_topology};
use iga_lumping::linalg::{BandedCholesky, DiagonalSolver};
use iga_lumping::lumping::Lumping;
use iga_lumping::spectral::{critical_timestep, deflate, lanczos, scaled_mass_solver, DeflationMode, LanczosConfig};
use iga_lumping::spline::SplineSpace;

fn one(_: &[f64]) -> f64 {
    1.0
}

#[test]
fn lanczos_deflation_extends_the_stable_step() {
    let space = SplineSpace::uniform_aniso(&[16, 8], 3, 2).unwrap().with_dirichlet();
    let pair = assemble_single_patch(&space, &catalog::plate_with_hole(), &one, &one).unwrap();
    let k = pair.k.matrix();
    let p1 = pair.lumped_mass(Lumping::Block(1)).unwrap();
    let chol = BandedCholesky::factor(&p1, None).unwrap();
    let r = 10;
    let res = lanczos(k, &chol, &p1, &LanczosConfig::new(r + 1).with_tol(1e-8), 1).unwrap();
    assert!(res.converged());
    let pencil = deflate(k, &p1, r, DeflationMode::ScaleMass, &res.pairs).unwrap();
    let scaled = scaled_mass_solver(&pencil, &chol).unwrap();
    let dt_plain = critical_timestep(res.pairs.values[0]).unwrap();
    let dt_scaled = critical_timestep(pencil.lambda_cut).unwrap();
    assert!(dt_scaled > 1.2 * dt_plain);
    let u0: Vec<f64> = (0..k.nrows()).map(|i| ((i * 7919) % 101) as f64 / 101.0 - 0.5).collect();
    assert!(!is_stable(&chol, k, &u0, 0.98 * dt_scaled, 2000).unwrap());
    assert!(is_stable(&scaled, k, &u0, 0.98 * dt_scaled, 2000).unwrap());
}

#[test]
fn lumped_wave_solution_tracks_the_consistent_one() {
    let space = SplineSpace::uniform(2, 8, 2, 1).unwrap().with_dirichlet();
    let patch = catalog::plate_with_hole();
    let problem = manufactured_wave_problem(&space, &patch).unwrap();
    let k = problem.pair.k.matrix();
    let force = |t: f64| problem.force(t);
    let t_end = 0.5;
    let dt = 2e-3;
    let mut errors = Vec::new();
    for lumping in [Lumping::Consistent, Lumping::Block(2)] {
        let b = problem.pair.lumped_mass(lumping).unwrap();
        let solver = BandedCholesky::factor(&b, None).unwrap();
        let traj = central_difference(&solver, k, Some(&force), &problem.u0, &problem.v0, dt, t_end, 0).unwrap();
        assert!(traj.stable);
        let t = traj.times[traj.times.len() - 1];
        errors.push(l2_error(&space, &patch, traj.last_state().unwrap(), &ManufacturedWave::exact, t).unwrap());
    }
    let norm = l2_error(&space, &patch, &vec![0.0; k.nrows()], &ManufacturedWave::exact, t_end).unwrap();
    assert!(errors[0] / norm < 0.05, "{errors:?}");
    assert!(errors[1] / norm < 0.1, "{errors:?}");
}

#[test]
fn diagonal_lumping_runs_with_the_diagonal_solver() {
    let space = SplineSpace::uniform(2, 6, 2, 1).unwrap().with_dirichlet();
    let pair = assemble_single_patch(&space, &catalog::unit_square(), &one, &one).unwrap();
    let rowsum = pair.lumped_mass(Lumping::RowSum).unwrap();
    let solver = DiagonalSolver::new(rowsum.diagonal()).unwrap();
    let chol = BandedCholesky::factor(&rowsum, None).unwrap();
    let u0 = vec![1.0; rowsum.nrows()];
    let dt = 0.5 * critical_timestep(1.0).unwrap() / 10.0;
    let a = central_difference(&solver, pair.k.matrix(), None, &u0, &vec![0.0; u0.len()], dt, 20.0 * dt, 1).unwrap();
    let b = central_difference(&chol, pair.k.matrix(), None, &u0, &vec![0.0; u0.len()], dt, 20.0 * dt, 1).unwrap();
    for (x, y) in a.norms.iter().zip(&b.norms) {
        assert!((x - y).abs() <= 1e-12 * y.abs());
    }
}

#[test]
fn matrices_and_topologies_survive_file_round_trips() {
    let topo = catalog::plate_with_hole_two_patch();
    let text = write_topology(&topo);
    let back = read_topology(&text).unwrap();
    assert_eq!(write_topology(&back), text);

    let spaces = back.uniform_spaces(4, 2, 1, true).unwrap();
    let (global, _, _) = assemble_multipatch(&back, &spaces, &one, &one).unwrap();
    let mut buf = Vec::new();
    write_triplets(global.m.matrix(), &mut buf).unwrap();
    let m = read_triplets(buf.as_slice()).unwrap();
    assert_eq!(&m, global.m.matrix());
}
