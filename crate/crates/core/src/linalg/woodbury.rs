use super::FactorizedOperator;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Solver for `B + V diag(g) V^T` with `V = B U` and `U^T B U = I`, applied through the
/// base factorization of `B` as `B^{-1} - U (g^{-1} + I)^{-1} U^T`.
pub struct WoodburySolver<'a> {
    base: &'a dyn FactorizedOperator,
    u: DMatrix<f64>,
    // diagonal of (g^{-1} + I)^{-1}
    coeff: Vec<f64>,
}

impl<'a> WoodburySolver<'a> {
    pub fn new(base: &'a dyn FactorizedOperator, u: DMatrix<f64>, g: &[f64]) -> Result<Self> {
        if u.ncols() != g.len() {
            return Err(Error::LengthMismatch { expected: u.ncols(), got: g.len() });
        }
        if u.ncols() > 0 && u.nrows() != base.dim() {
            return Err(Error::LengthMismatch { expected: base.dim(), got: u.nrows() });
        }
        let mut coeff = Vec::with_capacity(g.len());
        for (j, &gj) in g.iter().enumerate() {
            if gj == 0.0 || 1.0 + gj == 0.0 || !gj.is_finite() {
                return Err(Error::SingularPerturbation(j));
            }
            coeff.push(gj / (1.0 + gj));
        }
        Ok(Self { base, u, coeff })
    }
}

impl FactorizedOperator for WoodburySolver<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.base.solve(rhs);
        for (j, c) in self.coeff.iter().enumerate() {
            let col = self.u.column(j);
            let t: f64 = col.iter().zip(rhs).map(|(a, b)| a * b).sum::<f64>() * c;
            for (xi, ui) in x.iter_mut().zip(col.iter()) {
                *xi -= t * ui;
            }
        }
        x
    }
}

/// `(B + B U diag(g) U^T B)^{-1} rhs` without forming the perturbed matrix.
pub fn woodbury_solve(base: &dyn FactorizedOperator, u: &DMatrix<f64>, g: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != base.dim() {
        return Err(Error::LengthMismatch { expected: base.dim(), got: rhs.len() });
    }
    Ok(WoodburySolver::new(base, u.clone(), g)?.solve(rhs))
}
