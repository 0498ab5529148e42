use crate::assembly::{assemble_single_patch, l2_projection, load_vector, AssembledPair};
use crate::error::Result;
use crate::geometry::Patch;
use crate::spline::SplineSpace;
use std::f64::consts::PI;

/// Spatial factor `S = x y (x+4) (y-4) (x^2+y^2-1)`, zero on the quarter plate boundary.
pub fn plate_shape(x: &[f64]) -> f64 {
    let (a, b, q) = factors(x);
    a * b * q
}

fn factors(x: &[f64]) -> (f64, f64, f64) {
    let (x, y) = (x[0], x[1]);
    (x * x + 4.0 * x, y * y - 4.0 * y, x * x + y * y - 1.0)
}

/// Laplacian of [`plate_shape`].
pub fn plate_shape_laplacian(x: &[f64]) -> f64 {
    let (a, b, q) = factors(x);
    let (x, y) = (x[0], x[1]);
    b * (2.0 * q + 4.0 * x * (2.0 * x + 4.0) + 2.0 * a) + a * (2.0 * q + 4.0 * y * (2.0 * y - 4.0) + 2.0 * b)
}

/// Manufactured wave solution `u = S(x) (2 + sin 2 pi t)` with `rho = kappa = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedWave;

impl ManufacturedWave {
    pub fn time_factor(t: f64) -> f64 {
        2.0 + (2.0 * PI * t).sin()
    }

    pub fn exact(x: &[f64], t: f64) -> f64 {
        plate_shape(x) * Self::time_factor(t)
    }

    pub fn exact_dt(x: &[f64], t: f64) -> f64 {
        plate_shape(x) * 2.0 * PI * (2.0 * PI * t).cos()
    }

    /// `f = u_tt - Laplace(u)`.
    pub fn source(x: &[f64], t: f64) -> f64 {
        -4.0 * PI * PI * (2.0 * PI * t).sin() * plate_shape(x) - Self::time_factor(t) * plate_shape_laplacian(x)
    }
}

/// Discrete manufactured problem: matrices, projected initial data and the
/// separable load `f(t) = c1(t) F_S + c2(t) F_lap`.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    pub pair: AssembledPair,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    load_shape: Vec<f64>,
    load_laplacian: Vec<f64>,
}

impl WaveProblem {
    pub fn force(&self, t: f64) -> Vec<f64> {
        let c1 = -4.0 * PI * PI * (2.0 * PI * t).sin();
        let c2 = -ManufacturedWave::time_factor(t);
        self.load_shape.iter().zip(&self.load_laplacian).map(|(s, l)| c1 * s + c2 * l).collect()
    }
}

/// Assemble the manufactured plate problem on `space` (homogeneous Dirichlet faces expected).
pub fn manufactured_wave_problem(space: &SplineSpace, patch: &Patch) -> Result<WaveProblem> {
    let one = |_: &[f64]| 1.0;
    let pair = assemble_single_patch(space, patch, &one, &one)?;
    let m = pair.m.matrix();
    let u0 = l2_projection(space, patch, m, &|x: &[f64]| ManufacturedWave::exact(x, 0.0))?;
    let v0 = l2_projection(space, patch, m, &|x: &[f64]| ManufacturedWave::exact_dt(x, 0.0))?;
    let load_shape = load_vector(space, patch, &plate_shape)?;
    let load_laplacian = load_vector(space, patch, &plate_shape_laplacian)?;
    Ok(WaveProblem { pair, u0, v0, load_shape, load_laplacian })
}
