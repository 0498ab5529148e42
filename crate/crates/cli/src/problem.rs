//! Discrete systems built from a configuration: single patch, multipatch or trimmed.

use crate::config::{Config, Density, GeometrySpec, TrimSpec};
use crate::error::{CliError, CliResult};
use iga_lumping::assembly::{assemble_multipatch, assemble_single_patch, assemble_trimmed, jacobi_rescale, AssembledPair};
use iga_lumping::geometry::{catalog, classify_elements, rotated_square, DofMap, MultipatchTopology, Patch};
use iga_lumping::linalg::{dense_generalized_eigvals, BandedCholesky, SparseMatrix};
use iga_lumping::lumping::{multipatch_lump, HierBandedMatrix, Lumping};
use iga_lumping::spectral::{lanczos, LanczosConfig, LanczosResult};
use iga_lumping::spline::SplineSpace;

/// Largest system handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4000;

fn one(_: &[f64]) -> f64 {
    1.0
}

fn nonseparable(x: &[f64]) -> f64 {
    (x[0] * x[1]).sin().abs() + x[0] + x[1] + 1.0
}

fn smooth(x: &[f64]) -> f64 {
    2.0 + (x[0] * x[1]).sin()
}

pub fn density_field(d: Density) -> fn(&[f64]) -> f64 {
    match d {
        Density::One => one,
        Density::Nonseparable => nonseparable,
        Density::Smooth => smooth,
    }
}

pub enum Geometry {
    Single(Patch),
    Multi(MultipatchTopology),
}

pub fn geometry(spec: &GeometrySpec) -> Geometry {
    match *spec {
        GeometrySpec::UnitInterval => Geometry::Single(catalog::unit_interval()),
        GeometrySpec::UnitSquare => Geometry::Single(catalog::unit_square()),
        GeometrySpec::UnitCube => Geometry::Single(catalog::unit_cube()),
        GeometrySpec::StretchedSquare => Geometry::Single(catalog::stretched_square()),
        GeometrySpec::QuarterAnnulus { r_in, r_out } => Geometry::Single(catalog::quarter_annulus(r_in, r_out)),
        GeometrySpec::PlateWithHole => Geometry::Single(catalog::plate_with_hole()),
        GeometrySpec::Magnet => Geometry::Single(catalog::magnet()),
        GeometrySpec::PlateWithHoleTwoPatch => Geometry::Multi(catalog::plate_with_hole_two_patch()),
        GeometrySpec::TwistedBox { twist } => Geometry::Multi(catalog::twisted_box(twist)),
        GeometrySpec::RectangleGrid { lx, ly, px, py } => Geometry::Multi(catalog::rectangle_grid(lx, ly, px, py)),
        GeometrySpec::TwoIntervals => Geometry::Multi(catalog::two_intervals()),
    }
}

/// Spline space of a single patch with the configured degree, regularity and boundary.
pub fn single_space(cfg: &Config, subdivisions: &[usize]) -> CliResult<SplineSpace> {
    let space = SplineSpace::uniform_aniso(subdivisions, cfg.degree, cfg.regularity)?;
    Ok(if cfg.dirichlet { space.with_dirichlet() } else { space })
}

enum Kind {
    Structured(AssembledPair),
    Multi { global: AssembledPair, locals: Vec<HierBandedMatrix>, map: DofMap },
}

/// Assembled stiffness and mass of one discretization.
pub struct Problem {
    kind: Kind,
}

impl Problem {
    /// Build the configured system with the given subdivisions; a trim section is honoured
    /// when `trim` is passed.
    pub fn build(cfg: &Config, subdivisions: &[usize], trim: Option<(&TrimSpec, f64)>) -> CliResult<Self> {
        let rho = density_field(cfg.density);
        match geometry(&cfg.geometry) {
            Geometry::Single(patch) => {
                let space = single_space(cfg, subdivisions)?;
                let pair = match trim {
                    None => assemble_single_patch(&space, &patch, &rho, &one)?,
                    Some((t, angle)) => {
                        let region = rotated_square(t.side, angle, t.shift);
                        let mask = classify_elements(&space, &patch, region, t.subdepth)?;
                        assemble_trimmed(&space, &patch, &mask, &rho, &one, t.subdepth)?
                    }
                };
                Ok(Problem { kind: Kind::Structured(pair) })
            }
            Geometry::Multi(topo) => {
                if trim.is_some() {
                    return Err(CliError::config(None, "trimming needs a single-patch geometry"));
                }
                let spaces = topo.uniform_spaces(subdivisions[0], cfg.degree, cfg.regularity, cfg.dirichlet)?;
                let (global, locals, map) = assemble_multipatch(&topo, &spaces, &rho, &one)?;
                let locals = locals.into_iter().map(|p| p.m).collect();
                Ok(Problem { kind: Kind::Multi { global, locals, map } })
            }
        }
    }

    fn global(&self) -> &AssembledPair {
        match &self.kind {
            Kind::Structured(p) => p,
            Kind::Multi { global, .. } => global,
        }
    }

    pub fn stiffness(&self) -> &SparseMatrix {
        self.global().k.matrix()
    }

    pub fn consistent(&self) -> &SparseMatrix {
        self.global().m.matrix()
    }

    pub fn ndofs(&self) -> usize {
        self.global().ndofs()
    }

    /// Mass matrix with the given treatment; multipatch systems are lumped patch by patch.
    pub fn mass(&self, lumping: Lumping) -> CliResult<SparseMatrix> {
        match &self.kind {
            Kind::Structured(pair) => Ok(pair.lumped_mass(lumping)?),
            Kind::Multi { global, .. } if lumping == Lumping::Consistent => Ok(global.m.matrix().clone()),
            Kind::Multi { locals, map, .. } => Ok(multipatch_lump(locals, map, lumping)?),
        }
    }
}

/// Ascending eigenvalues of `(A, B)`, optionally after symmetric Jacobi scaling.
pub fn dense_spectrum(a: &SparseMatrix, b: &SparseMatrix, jacobi: bool) -> CliResult<Vec<f64>> {
    let n = a.nrows();
    if n > DENSE_LIMIT {
        return Err(CliError::config(None, format!("{n} dofs exceed the dense solver limit {DENSE_LIMIT}; use method = \"lanczos\"")));
    }
    let values = if jacobi {
        let (da, db, _) = jacobi_rescale(a, b)?;
        dense_generalized_eigvals(&da.to_dense(), &db.to_dense())?
    } else {
        dense_generalized_eigvals(&a.to_dense(), &b.to_dense())?
    };
    Ok(values)
}

/// Top `count` eigenpairs of `(A, B)` by Lanczos; fails when any pair misses `tol`.
pub fn top_pairs(a: &SparseMatrix, b: &SparseMatrix, count: usize, tol: f64, max_restarts: usize, seed: u64) -> CliResult<LanczosResult> {
    let chol = BandedCholesky::factor(b, None)?;
    let mut cfg = LanczosConfig::new(count).with_tol(tol);
    cfg.max_restarts = max_restarts;
    Ok(lanczos(a, &chol, b, &cfg, seed)?.require_converged(tol)?)
}

/// Krylov dimension used for the largest eigenvalue alone.
const LAMBDA_MAX_SUBSPACE: usize = 30;

/// Largest eigenvalue of `(A, B)`: dense for small systems, otherwise one Lanczos pair
/// in a wide subspace so that clustered top eigenvalues still converge.
pub fn lambda_max(a: &SparseMatrix, b: &SparseMatrix, seed: u64) -> CliResult<f64> {
    let n = a.nrows();
    if n <= LAMBDA_MAX_SUBSPACE {
        return Ok(*dense_spectrum(a, b, false)?.last().expect("nonempty"));
    }
    let chol = BandedCholesky::factor(b, None)?;
    let mut cfg = LanczosConfig::new(1).with_tol(1e-10);
    cfg.m = LAMBDA_MAX_SUBSPACE;
    let res = lanczos(a, &chol, b, &cfg, seed)?.require_converged(cfg.tol)?;
    Ok(res.pairs.values[0])
}
