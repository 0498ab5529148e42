use super::hier::HierBandedMatrix;
use crate::error::{Error, Result};
use crate::geometry::DofMap;
use crate::linalg::SparseMatrix;

/// Diagonal of absolute row sums.
pub fn lump_rowsum(b: &SparseMatrix) -> SparseMatrix {
    let d: Vec<f64> = (0..b.nrows()).map(|i| b.row(i).map(|(_, v)| v.abs()).sum()).collect();
    SparseMatrix::from_diagonal(&d)
}

/// `P_i = D_i + L(R_i)`: keep top-level block diagonals `|I - J| < i`, lump the rest
/// onto the diagonal blocks. `P_1` is the block lumped matrix and `P_{n_1} = B`.
pub fn block_lumped_family(b: &HierBandedMatrix, i: usize) -> Result<HierBandedMatrix> {
    let s = b.require_structure()?;
    let n1 = s.dims[0];
    if i < 1 || i > n1 {
        return Err(Error::IndexOutOfRange { index: i, max: n1 });
    }
    let r1 = s.block_sizes()[0];
    let scalar = s.dims.len() == 1;
    let triplets: Vec<_> = b
        .matrix()
        .iter()
        .map(|(row, col, v)| {
            let (bi, bj) = (row / r1, col / r1);
            if bi.abs_diff(bj) >= i {
                let v = if scalar { v.abs() } else { v };
                (row, bi * r1 + col % r1, v)
            } else {
                (row, col, v)
            }
        })
        .collect();
    let n = b.nrows();
    let mut bw = s.bandwidths.clone();
    bw[0] = bw[0].min(i - 1);
    HierBandedMatrix::new(SparseMatrix::from_triplets(n, n, &triplets), s.dims.clone(), bw)
}

/// Block lumping operator `L(B)` on the top-level partition.
pub fn block_lump(b: &HierBandedMatrix) -> Result<HierBandedMatrix> {
    block_lumped_family(b, 1)
}

/// Hierarchical lumped matrix `H_k`: block lumping applied recursively down `k` levels.
/// `H_d` is the (absolute) row-sum lumped matrix.
pub fn hierarchical_lump(b: &HierBandedMatrix, k: usize) -> Result<HierBandedMatrix> {
    let s = b.require_structure()?;
    let d = s.dims.len();
    if k < 1 || k > d {
        return Err(Error::IndexOutOfRange { index: k, max: d });
    }
    let r = s.block_sizes()[k - 1];
    let scalar = k == d;
    let triplets: Vec<_> = b
        .matrix()
        .iter()
        .map(|(row, col, v)| {
            let v = if scalar { v.abs() } else { v };
            (row, (row / r) * r + col % r, v)
        })
        .collect();
    let n = b.nrows();
    let mut bw = s.bandwidths.clone();
    bw[..k].iter_mut().for_each(|x| *x = 0);
    HierBandedMatrix::new(SparseMatrix::from_triplets(n, n, &triplets), s.dims.clone(), bw)
}

/// Mass treatment selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lumping {
    Consistent,
    /// `P_i` with `1 <= i <= n_1`.
    Block(usize),
    /// `H_k` with `1 <= k <= d`.
    Hierarchical(usize),
    RowSum,
}

impl Lumping {
    pub fn apply(&self, b: &HierBandedMatrix) -> Result<HierBandedMatrix> {
        match *self {
            Lumping::Consistent => Ok(b.clone()),
            Lumping::Block(i) => block_lumped_family(b, i),
            Lumping::Hierarchical(k) => hierarchical_lump(b, k),
            Lumping::RowSum => {
                let l = lump_rowsum(b.matrix());
                match b.structure() {
                    Some(s) => HierBandedMatrix::new(l, s.dims.clone(), vec![0; s.dims.len()]),
                    None => Ok(HierBandedMatrix::unstructured(l)),
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Lumping::Consistent => "M".into(),
            Lumping::Block(i) => format!("P{i}"),
            Lumping::Hierarchical(k) => format!("H{k}"),
            Lumping::RowSum => "rowsum".into(),
        }
    }
}

/// `sum_r R_r^T P_r R_r` with `P_r` the lumped local matrices.
pub fn multipatch_lump(locals: &[HierBandedMatrix], map: &DofMap, lumping: Lumping) -> Result<SparseMatrix> {
    if locals.len() != map.local_to_global.len() {
        return Err(Error::InconsistentMaps(format!(
            "{} local matrices for {} patch maps",
            locals.len(),
            map.local_to_global.len()
        )));
    }
    let mut triplets = Vec::new();
    for (r, (local, l2g)) in locals.iter().zip(&map.local_to_global).enumerate() {
        if local.nrows() != l2g.len() {
            return Err(Error::InconsistentMaps(format!(
                "patch {r}: matrix of size {} for {} mapped dofs",
                local.nrows(),
                l2g.len()
            )));
        }
        if let Some(&g) = l2g.iter().find(|&&g| g >= map.ndofs) {
            return Err(Error::InconsistentMaps(format!("patch {r} maps to global dof {g} of {}", map.ndofs)));
        }
        let p = lumping.apply(local)?;
        triplets.extend(p.matrix().iter().map(|(i, j, v)| (l2g[i], l2g[j], v)));
    }
    Ok(SparseMatrix::from_triplets(map.ndofs, map.ndofs, &triplets))
}

/// Lump a trimmed matrix by padding it with zeros to the full tensor size, lumping,
/// and deleting the padded rows and columns again.
///
/// `embedding[a]` is the tensor index of active dof `a`.
pub fn pad_lump_trim(
    m: &SparseMatrix,
    embedding: &[usize],
    dims: &[usize],
    bandwidths: &[usize],
    lumping: Lumping,
) -> Result<SparseMatrix> {
    let n: usize = dims.iter().product();
    if embedding.len() != m.nrows() {
        return Err(Error::LengthMismatch { expected: m.nrows(), got: embedding.len() });
    }
    let mut seen = vec![false; n];
    for &e in embedding {
        if e >= n || seen[e] {
            return Err(Error::InconsistentMaps(format!("embedding index {e} repeated or outside {n}")));
        }
        seen[e] = true;
    }
    let padded: Vec<_> = m.iter().map(|(i, j, v)| (embedding[i], embedding[j], v)).collect();
    let full = HierBandedMatrix::new(SparseMatrix::from_triplets(n, n, &padded), dims.to_vec(), bandwidths.to_vec())?;
    Ok(lumping.apply(&full)?.matrix().principal_submatrix(embedding))
}
