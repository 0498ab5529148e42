//! Sparse storage, structured direct solvers and the dense eigen oracle.

mod banded;
mod dense;
mod schur;
mod sparse;
mod woodbury;

pub use banded::BandedCholesky;
pub use dense::{dense_generalized_eig, dense_generalized_eigvals, DenseCholesky, GeneralizedEigen};
pub use schur::SchurSaddle;
pub use sparse::SparseMatrix;
pub use woodbury::{woodbury_solve, WoodburySolver};

use crate::error::{Error, Result};

/// A factorized operator: maps a right-hand side to the solution of `A x = rhs`.
pub trait FactorizedOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn solve(&self, rhs: &[f64]) -> Vec<f64>;
}

/// A symmetric linear map applied to vectors.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

/// Diagonal matrix viewed both as an operator and as its own factorization.
#[derive(Debug, Clone)]
pub struct DiagonalSolver {
    diag: Vec<f64>,
}

impl DiagonalSolver {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if let Some((row, &value)) = diag.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonpositiveDiagonal { row, value });
        }
        Ok(Self { diag })
    }
}

impl FactorizedOperator for DiagonalSolver {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        rhs.iter().zip(&self.diag).map(|(b, d)| b / d).collect()
    }
}

/// Scalar bandwidth `sum_i b_i r_i` of a d-level banded matrix, `r_k = prod_{j>k} n_j`.
pub fn hier_bandwidth(b: &[usize], n: &[usize]) -> Result<usize> {
    if b.len() != n.len() {
        return Err(Error::LengthMismatch { expected: n.len(), got: b.len() });
    }
    let mut r = 1;
    let mut total = 0;
    for l in (0..n.len()).rev() {
        total += b[l] * r;
        r *= n[l];
    }
    Ok(total)
}

/// Block sizes `r_k = prod_{j>k} n_j`, one per level.
pub fn block_sizes(n: &[usize]) -> Vec<usize> {
    let mut r = vec![1; n.len()];
    for l in (0..n.len().saturating_sub(1)).rev() {
        r[l] = r[l + 1] * n[l + 1];
    }
    r
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
