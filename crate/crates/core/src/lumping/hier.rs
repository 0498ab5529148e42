use crate::error::{Error, Result};
use crate::linalg::{block_sizes, hier_bandwidth, SparseMatrix};
use crate::spline::multi_index;

/// Dims and per-level bandwidths of a d-level banded matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierStructure {
    pub dims: Vec<usize>,
    pub bandwidths: Vec<usize>,
}

impl HierStructure {
    /// Block sizes `r_k = prod_{j>k} n_j`.
    pub fn block_sizes(&self) -> Vec<usize> {
        block_sizes(&self.dims)
    }

    pub fn scalar_bandwidth(&self) -> usize {
        hier_bandwidth(&self.bandwidths, &self.dims).expect("lengths checked at construction")
    }
}

/// Symmetric sparse matrix optionally tagged with its tensor block hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct HierBandedMatrix {
    matrix: SparseMatrix,
    structure: Option<HierStructure>,
}

impl HierBandedMatrix {
    pub fn new(matrix: SparseMatrix, dims: Vec<usize>, bandwidths: Vec<usize>) -> Result<Self> {
        if dims.len() != bandwidths.len() {
            return Err(Error::LengthMismatch { expected: dims.len(), got: bandwidths.len() });
        }
        let n: usize = dims.iter().product();
        if n != matrix.nrows() || n != matrix.ncols() {
            return Err(Error::LengthMismatch { expected: n, got: matrix.nrows() });
        }
        Ok(Self { matrix, structure: Some(HierStructure { dims, bandwidths }) })
    }

    pub fn unstructured(matrix: SparseMatrix) -> Self {
        Self { matrix, structure: None }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix {
        self.matrix
    }

    pub fn structure(&self) -> Option<&HierStructure> {
        self.structure.as_ref()
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.structure.as_ref().map(|s| s.dims.as_slice())
    }

    pub fn bandwidths(&self) -> Option<&[usize]> {
        self.structure.as_ref().map(|s| s.bandwidths.as_slice())
    }

    pub fn require_structure(&self) -> Result<&HierStructure> {
        self.structure
            .as_ref()
            .ok_or_else(|| Error::MissingStructure("matrix has no dims vector".into()))
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when every nonzero `(i, j)` satisfies `|i_l - j_l| <= b_l` for all levels.
    pub fn is_level_banded(&self) -> bool {
        let Some(s) = &self.structure else { return false };
        self.matrix.iter().filter(|&(_, _, v)| v != 0.0).all(|(i, j, _)| {
            let (mi, mj) = (multi_index(i, &s.dims), multi_index(j, &s.dims));
            mi.iter().zip(&mj).zip(&s.bandwidths).all(|((a, b), &w)| a.abs_diff(*b) <= w)
        })
    }
}
