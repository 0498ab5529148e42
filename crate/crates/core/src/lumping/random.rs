use super::hier::HierBandedMatrix;
use crate::error::Result;
use crate::linalg::SparseMatrix;
use nalgebra::DMatrix;
use rand::Rng;

fn shift_to_definite(a: &mut DMatrix<f64>, rng: &mut impl Rng) {
    let lmin = a.clone().symmetric_eigenvalues().min();
    let mu = (-lmin).max(0.0) + rng.random_range(0.05..0.5);
    for i in 0..a.nrows() {
        a[(i, i)] += mu;
    }
}

fn generate(dims: &[usize], bandwidths: &[usize], rng: &mut impl Rng) -> DMatrix<f64> {
    let n = dims[0];
    let b = bandwidths[0];
    if dims.len() == 1 {
        // nonnegative banded Gram matrix X^T X
        let mut x = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..(i + b + 1).min(n) {
                x[(i, j)] = rng.random_range(0.0..1.0);
            }
        }
        let mut a = x.transpose() * x;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > b {
                    a[(i, j)] = 0.0;
                }
            }
        }
        shift_to_definite(&mut a, rng);
        return a;
    }
    let r: usize = dims[1..].iter().product();
    let mut a = DMatrix::zeros(n * r, n * r);
    for bi in 0..n {
        for bj in bi..(bi + b + 1).min(n) {
            let blk = generate(&dims[1..], &bandwidths[1..], rng);
            a.view_mut((bi * r, bj * r), (r, r)).copy_from(&blk);
            if bj != bi {
                a.view_mut((bj * r, bi * r), (r, r)).copy_from(&blk);
            }
        }
    }
    shift_to_definite(&mut a, rng);
    a
}

/// Random SPD matrix whose blocks are recursively symmetric positive definite and
/// d-level banded with the given bandwidths.
pub fn random_spn(dims: &[usize], bandwidths: &[usize], rng: &mut impl Rng) -> Result<HierBandedMatrix> {
    let a = generate(dims, bandwidths, rng);
    HierBandedMatrix::new(SparseMatrix::from_dense(&a, 0.0), dims.to_vec(), bandwidths.to_vec())
}
