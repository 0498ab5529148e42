//! Lanczos eigensolver, spectral deflation of pencils, local stiffness scaling and
//! CFL quantities.

mod deflation;
mod lanczos;

pub use deflation::{
    assemble_low_rank, deflate, local_stiffness_scale, scaled_mass_solve, scaled_mass_solver, DeflationMode,
    LowRankSum, ScaledPencil,
};
pub use lanczos::{lanczos, LanczosConfig, LanczosResult};

use crate::error::{Error, Result};
use crate::linalg::{dense_generalized_eig, BandedCholesky, FactorizedOperator, SparseMatrix};
use std::io::Write;

/// Eigenpairs with the convergence status of the method that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub converged: bool,
}

impl Eigenpairs {
    /// Pairs sorted by decreasing eigenvalue.
    pub fn descending(&self) -> Vec<(f64, &[f64])> {
        let mut out: Vec<(f64, &[f64])> = self.values.iter().copied().zip(self.vectors.iter().map(|v| v.as_slice())).collect();
        out.sort_by(|x, y| y.0.total_cmp(&x.0));
        out
    }
}

/// Largest `count` eigenpairs of `(A, B)` from the dense oracle, descending.
pub fn dense_top_pairs(a: &SparseMatrix, b: &SparseMatrix, count: usize) -> Result<Eigenpairs> {
    let n = a.nrows();
    if count > n {
        return Err(Error::InvalidRank { rank: count, dim: n });
    }
    let eig = dense_generalized_eig(&a.to_dense(), &b.to_dense())?;
    let idx: Vec<usize> = (n - count..n).rev().collect();
    Ok(Eigenpairs {
        values: idx.iter().map(|&i| eig.values[i]).collect(),
        vectors: idx.iter().map(|&i| eig.vectors.column(i).iter().copied().collect()).collect(),
        converged: true,
    })
}

/// Critical step `2 / sqrt(l_max)` of the central difference method.
pub fn critical_timestep(lambda_max: f64) -> Result<f64> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::DomainViolation(format!("largest eigenvalue must be positive, got {lambda_max}")));
    }
    Ok(2.0 / lambda_max.sqrt())
}

/// Critical step increase `sqrt(l_n / l_{n-r})` obtained by deflation.
pub fn cfl_gain(lambda_n: f64, lambda_cut: f64) -> Result<f64> {
    if !(lambda_cut > 0.0) || !(lambda_n >= lambda_cut) {
        return Err(Error::DomainViolation(format!("need l_n >= l_cut > 0, got {lambda_n} and {lambda_cut}")));
    }
    Ok((lambda_n / lambda_cut).sqrt())
}

/// Smallest eigenvalue of `(A, B)` by inverse iteration with a banded Cholesky of `A`.
///
/// Both matrices must be symmetric and `A` positive definite.
pub fn smallest_eigenvalue(a: &SparseMatrix, b: &SparseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    let fa = BandedCholesky::factor(a, None)?;
    // smooth start: positive everywhere, so not orthogonal to the ground state
    let mut x = vec![1.0; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..max_iter {
        let y = fa.solve(&b.matvec(&x));
        let ay = a.matvec(&y);
        let by = b.matvec(&y);
        let num: f64 = y.iter().zip(&ay).map(|(u, v)| u * v).sum();
        let den: f64 = y.iter().zip(&by).map(|(u, v)| u * v).sum();
        let next = num / den;
        let s = den.sqrt();
        x = y.iter().map(|v| v / s).collect();
        if (next - lambda).abs() <= tol * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::NoConvergence { converged: 0, wanted: 1, restarts: max_iter })
}

/// Split an ascending spectrum at `rel * l_max` into (zero modes, remaining eigenvalues).
pub fn split_zero_modes(values: &[f64], rel: f64) -> (Vec<f64>, Vec<f64>) {
    let lmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().partition(|v| v.abs() < rel * lmax)
}

/// Default relative threshold below which eigenvalues count as zero modes.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-8;

/// Write `k,lambda,pencil` rows (1-based `k`) for each labelled spectrum.
pub fn write_spectrum_csv(mut w: impl Write, spectra: &[(String, Vec<f64>)]) -> Result<()> {
    writeln!(w, "k,lambda,pencil")?;
    for (label, values) in spectra {
        for (k, v) in values.iter().enumerate() {
            writeln!(w, "{},{:.16e},{}", k + 1, v, label)?;
        }
    }
    Ok(())
}
