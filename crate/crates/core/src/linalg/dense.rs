use super::FactorizedOperator;
use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

/// Dense Cholesky factorization.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    chol: Cholesky<f64, Dyn>,
}

impl DenseCholesky {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        Cholesky::new(a.clone())
            .map(|chol| Self { chol })
            .ok_or_else(|| Error::DomainViolation("matrix is not symmetric positive definite".into()))
    }

    pub fn l(&self) -> DMatrix<f64> {
        self.chol.l()
    }
}

impl FactorizedOperator for DenseCholesky {
    fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.chol.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec()
    }
}

/// Eigenpairs of a symmetric-definite pencil, ascending, with `U^T B U = I`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn standard_form(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::LengthMismatch { expected: n, got: b.nrows() });
    }
    let l = Cholesky::new(b.clone())
        .ok_or_else(|| Error::DomainViolation("B is not symmetric positive definite".into()))?
        .l();
    let mut c = a.clone();
    l.solve_lower_triangular_mut(&mut c);
    let mut c = c.transpose();
    l.solve_lower_triangular_mut(&mut c);
    let c = (&c + c.transpose()) * 0.5;
    Ok((c, l))
}

/// All eigenpairs of `A u = lambda B u` by reduction to standard form.
pub fn dense_generalized_eig(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    let (c, l) = standard_form(a, b)?;
    let eig = SymmetricEigen::new(c);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut w = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        w.set_column(dst, &eig.eigenvectors.column(src));
    }
    let lt = l.transpose();
    lt.solve_upper_triangular_mut(&mut w);
    Ok(GeneralizedEigen { values: order.iter().map(|&i| eig.eigenvalues[i]).collect(), vectors: w })
}

/// Eigenvalues only, ascending.
pub fn dense_generalized_eigvals(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (c, _) = standard_form(a, b)?;
    let mut v: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}
