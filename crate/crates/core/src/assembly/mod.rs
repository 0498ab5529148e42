//! Gauss quadrature assembly of mass and stiffness matrices on single-patch,
//! multipatch and trimmed discretizations.

mod quadrature;
mod triplets;

pub use quadrature::gauss_legendre;
pub use triplets::{read_triplets, write_triplets};

pub(crate) use quadrature::{Mesh, QuadPoint};

use crate::error::{Error, Result};
use crate::geometry::{DofMap, ElementClass, Field, MultipatchTopology, Patch, TrimMask};
use crate::linalg::{BandedCholesky, FactorizedOperator, SparseMatrix};
use crate::lumping::{pad_lump_trim, HierBandedMatrix, HierStructure, Lumping};
use crate::spline::SplineSpace;

/// Stiffness and mass matrices of one discretization.
#[derive(Debug, Clone)]
pub struct AssembledPair {
    pub k: HierBandedMatrix,
    pub m: HierBandedMatrix,
    /// Retained tensor index (reduced lexicographic) of each dof.
    pub embedding: Vec<usize>,
    /// Tensor structure of the untrimmed background, for trimmed systems.
    pub background: Option<HierStructure>,
}

impl AssembledPair {
    pub fn ndofs(&self) -> usize {
        self.m.nrows()
    }

    /// Mass matrix with the given treatment; trimmed systems are lumped by padding.
    pub fn lumped_mass(&self, lumping: Lumping) -> Result<SparseMatrix> {
        if self.m.structure().is_some() || matches!(lumping, Lumping::Consistent | Lumping::RowSum) {
            return Ok(lumping.apply(&self.m)?.into_matrix());
        }
        match &self.background {
            Some(s) => pad_lump_trim(self.m.matrix(), &self.embedding, &s.dims, &s.bandwidths, lumping),
            None => Err(Error::MissingStructure(format!("cannot apply {} without a dims vector", lumping.label()))),
        }
    }
}

fn add_element(
    k: &mut SparseMatrix,
    m: &mut SparseMatrix,
    dofs: &[Option<usize>],
    points: &[QuadPoint],
    rho: Field,
    kappa: Field,
) {
    let nloc = dofs.len();
    let d = points.first().map_or(0, |q| q.jac.nrows());
    let mut ke = vec![0.0; nloc * nloc];
    let mut me = vec![0.0; nloc * nloc];
    for q in points {
        let jinv = q.jac.clone().try_inverse().expect("checked at quadrature");
        let g = &jinv * jinv.transpose() * (kappa(&q.x) * q.weight);
        let c = rho(&q.x) * q.weight;
        let gg: Vec<Vec<f64>> = q
            .grads
            .iter()
            .map(|ga| (0..d).map(|r| (0..d).map(|s| g[(r, s)] * ga[s]).sum()).collect())
            .collect();
        for a in 0..nloc {
            if dofs[a].is_none() {
                continue;
            }
            let ca = c * q.values[a];
            for b in a..nloc {
                me[a * nloc + b] += ca * q.values[b];
                ke[a * nloc + b] += (0..d).map(|r| gg[a][r] * q.grads[b][r]).sum::<f64>();
            }
        }
    }
    for a in 0..nloc {
        let Some(i) = dofs[a] else { continue };
        for b in a..nloc {
            let Some(j) = dofs[b] else { continue };
            let (kv, mv) = (ke[a * nloc + b], me[a * nloc + b]);
            k.add_at(i, j, kv);
            m.add_at(i, j, mv);
            if i != j {
                k.add_at(j, i, kv);
                m.add_at(j, i, mv);
            }
        }
    }
}

fn assemble_with(
    space: &SplineSpace,
    patch: &Patch,
    rho: Field,
    kappa: Field,
    rule: impl Fn(&Mesh, &quadrature::Element) -> Result<Vec<QuadPoint>>,
) -> Result<(SparseMatrix, SparseMatrix)> {
    let mesh = Mesh::new(space, patch)?;
    let n = space.ndofs();
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    let (indptr, indices) = mesh.band_pattern();
    let mut k = SparseMatrix::from_pattern(n, n, indptr.clone(), indices.clone());
    let mut m = SparseMatrix::from_pattern(n, n, indptr, indices);
    for e in 0..mesh.element_count() {
        let el = mesh.element(e);
        let points = rule(&mesh, &el)?;
        add_element(&mut k, &mut m, &el.dofs, &points, rho, kappa);
    }
    Ok((k, m))
}

/// Stiffness `int (grad B_i)^T G grad B_j` and mass `int c B_i B_j` over the retained dofs.
pub fn assemble_single_patch(space: &SplineSpace, patch: &Patch, rho: Field, kappa: Field) -> Result<AssembledPair> {
    let (k, m) = assemble_with(space, patch, rho, kappa, |mesh, el| mesh.element_points(el))?;
    let dims = space.dims();
    let bw = space.bandwidths();
    Ok(AssembledPair {
        k: HierBandedMatrix::new(k.pruned(0.0), dims.clone(), bw.clone())?,
        m: HierBandedMatrix::new(m.pruned(0.0), dims, bw)?,
        embedding: (0..space.ndofs()).collect(),
        background: None,
    })
}

/// Global pair `sum R_r^T A_r R_r` plus the per-patch pairs and the dof map.
pub fn assemble_multipatch(
    topology: &MultipatchTopology,
    spaces: &[SplineSpace],
    rho: Field,
    kappa: Field,
) -> Result<(AssembledPair, Vec<AssembledPair>, DofMap)> {
    if spaces.len() != topology.patches().len() {
        return Err(Error::LengthMismatch { expected: topology.patches().len(), got: spaces.len() });
    }
    let map = topology.numbering(spaces)?;
    let locals = topology
        .patches()
        .iter()
        .zip(spaces)
        .map(|(p, s)| assemble_single_patch(s, p, rho, kappa))
        .collect::<Result<Vec<_>>>()?;
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for (local, l2g) in locals.iter().zip(&map.local_to_global) {
        kt.extend(local.k.matrix().iter().map(|(i, j, v)| (l2g[i], l2g[j], v)));
        mt.extend(local.m.matrix().iter().map(|(i, j, v)| (l2g[i], l2g[j], v)));
    }
    let n = map.ndofs;
    let global = if locals.len() == 1 {
        locals[0].clone()
    } else {
        AssembledPair {
            k: HierBandedMatrix::unstructured(SparseMatrix::from_triplets(n, n, &kt)),
            m: HierBandedMatrix::unstructured(SparseMatrix::from_triplets(n, n, &mt)),
            embedding: (0..n).collect(),
            background: None,
        }
    };
    Ok((global, locals, map))
}

/// Assembly on the active part of a trimmed patch.
///
/// Inside elements use the standard rule, cut elements the Gauss rule on the
/// `2^subdepth` subcells per direction whose mapped centre lies in the region.
/// Inactive dofs, and dofs whose support misses every retained cell, are removed.
pub fn assemble_trimmed(
    space: &SplineSpace,
    patch: &Patch,
    mask: &TrimMask,
    rho: Field,
    kappa: Field,
    subdepth: usize,
) -> Result<AssembledPair> {
    if mask.active().len() != space.ndofs() {
        return Err(Error::LengthMismatch { expected: space.ndofs(), got: mask.active().len() });
    }
    if mask.count(ElementClass::Outside) == mask.classes().len() {
        return Err(Error::EmptySystem);
    }
    let region = mask.region().clone();
    let keep = move |x: &[f64]| region(x) <= 0.0;
    let (k, m) = assemble_with(space, patch, rho, kappa, |mesh, el| {
        let e = crate::spline::linear_index(&el.index, &mesh.element_dims());
        match mask.classes()[e] {
            ElementClass::Inside => mesh.element_points(el),
            ElementClass::Outside => Ok(Vec::new()),
            ElementClass::Cut => mesh.subcell_points(el, subdepth, &keep),
        }
    })?;
    let diag = m.diagonal();
    let embedding: Vec<usize> = (0..space.ndofs()).filter(|&i| mask.active()[i] && diag[i] > 0.0).collect();
    if embedding.is_empty() {
        return Err(Error::EmptySystem);
    }
    Ok(AssembledPair {
        k: HierBandedMatrix::unstructured(k.principal_submatrix(&embedding).pruned(0.0)),
        m: HierBandedMatrix::unstructured(m.principal_submatrix(&embedding).pruned(0.0)),
        embedding,
        background: Some(HierStructure { dims: space.dims(), bandwidths: space.bandwidths() }),
    })
}

/// Symmetric Jacobi scaling `D = diag(1/sqrt(b_ii))` of a pencil; returns `(DAD, DBD, d)`.
pub fn jacobi_rescale(a: &SparseMatrix, b: &SparseMatrix) -> Result<(SparseMatrix, SparseMatrix, Vec<f64>)> {
    let mut d = Vec::with_capacity(b.nrows());
    for (row, v) in b.diagonal().into_iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonpositiveDiagonal { row, value: v });
        }
        d.push(1.0 / v.sqrt());
    }
    Ok((a.scale_symmetric(&d), b.scale_symmetric(&d), d))
}

/// Load vector `int f B_i` over the retained dofs.
pub fn load_vector(space: &SplineSpace, patch: &Patch, f: Field) -> Result<Vec<f64>> {
    let mesh = Mesh::new(space, patch)?;
    let mut out = vec![0.0; space.ndofs()];
    for e in 0..mesh.element_count() {
        let el = mesh.element(e);
        for q in mesh.element_points(&el)? {
            let fw = f(&q.x) * q.weight;
            for (a, dof) in el.dofs.iter().enumerate() {
                if let Some(i) = dof {
                    out[*i] += fw * q.values[a];
                }
            }
        }
    }
    Ok(out)
}

/// L2 projection of `f` onto the retained space using the consistent mass `m`.
pub fn l2_projection(space: &SplineSpace, patch: &Patch, m: &SparseMatrix, f: Field) -> Result<Vec<f64>> {
    let rhs = load_vector(space, patch, f)?;
    Ok(BandedCholesky::factor(m, None)?.solve(&rhs))
}
