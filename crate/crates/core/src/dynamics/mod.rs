//! Central difference time integration, stability boundaries, L2 errors and the
//! manufactured plate problem.

mod manufactured;

pub use manufactured::{manufactured_wave_problem, plate_shape, plate_shape_laplacian, ManufacturedWave, WaveProblem};

use crate::assembly::Mesh;
use crate::error::{Error, Result};
use crate::geometry::Patch;
use crate::linalg::{norm, FactorizedOperator, LinearOperator};
use crate::spline::SplineSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;

/// Time-dependent load vector.
pub type Force<'a> = &'a (dyn Fn(f64) -> Vec<f64> + Sync);

/// Growth of `|u|` over the initial scale that counts as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Time-stepped coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    /// Times of all computed steps, `t_n = n dt`.
    pub times: Vec<f64>,
    /// Euclidean norm of the coefficients at every step.
    pub norms: Vec<f64>,
    /// Stored coefficient vectors with their step indices.
    pub samples: Vec<(usize, Vec<f64>)>,
    /// False when the solution blew up; the loop stops at that step.
    pub stable: bool,
}

impl Trajectory {
    pub fn last_state(&self) -> Option<&[f64]> {
        self.samples.last().map(|(_, u)| u.as_slice())
    }
}

/// Number of steps `floor(T / dt)` with a relative guard against round-off.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    let q = t_end / dt;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * q.max(1.0) {
        r as usize
    } else {
        q.floor() as usize
    }
}

/// Central difference scheme `u^{n+1} = 2u^n - u^{n-1} + dt^2 M^{-1}(f^n - K u^n)` started
/// from the Taylor step `u^1 = u^0 + dt v^0 + dt^2/2 M^{-1}(f^0 - K u^0)`.
///
/// `store_every = s` keeps every `s`-th state (and the last one); `0` keeps only the last.
#[allow(clippy::too_many_arguments)]
pub fn central_difference(
    m_solve: &dyn FactorizedOperator,
    k_apply: &dyn LinearOperator,
    force: Option<Force>,
    u0: &[f64],
    v0: &[f64],
    dt: f64,
    t_end: f64,
    store_every: usize,
) -> Result<Trajectory> {
    let n = u0.len();
    if v0.len() != n || m_solve.dim() != n || k_apply.dim() != n {
        return Err(Error::LengthMismatch { expected: n, got: v0.len() });
    }
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::DomainViolation(format!("need dt > 0 and T > 0, got {dt} and {t_end}")));
    }
    let steps = step_count(t_end, dt);
    let accel = |u: &[f64], t: f64| -> Vec<f64> {
        let mut r = k_apply.apply(u);
        match force {
            Some(f) => {
                for (ri, fi) in r.iter_mut().zip(f(t)) {
                    *ri = fi - *ri;
                }
            }
            None => r.iter_mut().for_each(|x| *x = -*x),
        }
        m_solve.solve(&r)
    };
    let mut traj = Trajectory { dt, times: vec![0.0], norms: vec![norm(u0)], samples: Vec::new(), stable: true };
    let keep = |step: usize| store_every > 0 && step.is_multiple_of(store_every);
    if keep(0) || steps == 0 {
        traj.samples.push((0, u0.to_vec()));
    }
    if steps == 0 {
        return Ok(traj);
    }
    let a0 = accel(u0, 0.0);
    let mut prev = u0.to_vec();
    let mut cur: Vec<f64> = (0..n).map(|i| u0[i] + dt * v0[i] + 0.5 * dt * dt * a0[i]).collect();
    let scale = norm(u0).max(dt * norm(v0)).max(norm(&cur));
    for step in 1..=steps {
        let t = step as f64 * dt;
        let nu = norm(&cur);
        traj.times.push(t);
        traj.norms.push(nu);
        let blown = !nu.is_finite() || (scale > 0.0 && nu > BLOWUP_FACTOR * scale);
        if keep(step) || step == steps || blown {
            traj.samples.push((step, cur.clone()));
        }
        if blown {
            traj.stable = false;
            break;
        }
        if step == steps {
            break;
        }
        let a = accel(&cur, t);
        let next: Vec<f64> = (0..n).map(|i| 2.0 * cur[i] - prev[i] + dt * dt * a[i]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(traj)
}

/// Whether `steps` unforced steps from `u0` (zero velocity) stay bounded.
pub fn is_stable(m_solve: &dyn FactorizedOperator, k_apply: &dyn LinearOperator, u0: &[f64], dt: f64, steps: usize) -> Result<bool> {
    let v0 = vec![0.0; u0.len()];
    Ok(central_difference(m_solve, k_apply, None, u0, &v0, dt, dt * steps as f64, 0)?.stable)
}

/// Empirical stability boundary by bisection on `dt` in `[lo, hi]`, using `steps`
/// unforced steps from a seeded random initial state.
pub fn stability_boundary(
    m_solve: &dyn FactorizedOperator,
    k_apply: &dyn LinearOperator,
    mut lo: f64,
    mut hi: f64,
    steps: usize,
    rel_tol: f64,
    seed: u64,
) -> Result<f64> {
    let n = k_apply.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    if !is_stable(m_solve, k_apply, &u0, lo, steps)? {
        return Err(Error::DomainViolation(format!("lower bracket {lo} is already unstable")));
    }
    if is_stable(m_solve, k_apply, &u0, hi, steps)? {
        return Err(Error::DomainViolation(format!("upper bracket {hi} is still stable")));
    }
    while hi - lo > rel_tol * lo {
        let mid = 0.5 * (lo + hi);
        if is_stable(m_solve, k_apply, &u0, mid, steps)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `||u_h - u||_{L2}` by Gauss quadrature, with `exact(x, t)`.
pub fn l2_error(
    space: &SplineSpace,
    patch: &Patch,
    coeffs: &[f64],
    exact: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    t: f64,
) -> Result<f64> {
    if coeffs.len() != space.ndofs() {
        return Err(Error::LengthMismatch { expected: space.ndofs(), got: coeffs.len() });
    }
    let mesh = Mesh::new(space, patch)?;
    let mut sum = 0.0;
    for e in 0..mesh.element_count() {
        let el = mesh.element(e);
        for q in mesh.element_points(&el)? {
            let uh: f64 = el.dofs.iter().zip(&q.values).filter_map(|(i, v)| i.map(|i| coeffs[i] * v)).sum();
            let d = uh - exact(&q.x, t);
            sum += q.weight * d * d;
        }
    }
    Ok(sum.sqrt())
}

/// Steps `ceil(T / dt)` needed to reach `T`.
pub fn steps_to_reach(t_end: f64, dt: f64) -> usize {
    let s = step_count(t_end, dt);
    if (s as f64) * dt < t_end * (1.0 - 1e-12) {
        s + 1
    } else {
        s
    }
}

/// Cost ratio `(N_s + N_i) / N_w` of a deflated run (`N_s` steps plus `N_i` eigensolver
/// iterations) against the plain run with `N_w` steps.
pub fn iteration_ratio(scaled_steps: usize, eigen_iterations: usize, plain_steps: usize) -> Result<f64> {
    if plain_steps == 0 {
        return Err(Error::InvalidArgument("plain run has no steps".into()));
    }
    Ok((scaled_steps + eigen_iterations) as f64 / plain_steps as f64)
}

/// Write `t,norm[,l2_error]` rows.
pub fn write_trajectory_csv(mut w: impl Write, traj: &Trajectory, errors: Option<&[(f64, f64)]>) -> Result<()> {
    match errors {
        None => {
            writeln!(w, "t,norm")?;
            for (t, nu) in traj.times.iter().zip(&traj.norms) {
                writeln!(w, "{t:.10e},{nu:.16e}")?;
            }
        }
        Some(errs) => {
            writeln!(w, "t,norm,l2_error")?;
            for &(t, e) in errs {
                let step = step_count(t, traj.dt).min(traj.norms.len() - 1);
                writeln!(w, "{t:.10e},{:.16e},{e:.16e}", traj.norms[step])?;
            }
        }
    }
    Ok(())
}
