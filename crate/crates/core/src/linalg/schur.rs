use super::{BandedCholesky, DenseCholesky, FactorizedOperator, SparseMatrix};
use crate::error::{Error, Result};

/// Block elimination for `[[D, C], [C^T, X]]` with `D` block diagonal over patch interiors.
///
/// Each interior block is factored by banded Cholesky; the interface Schur complement
/// `S = X - C^T D^{-1} C` is formed densely once and factored.
pub struct SchurSaddle {
    n: usize,
    interior: Vec<Vec<usize>>,
    interface: Vec<usize>,
    d_factors: Vec<BandedCholesky>,
    // C_r^T with rows indexed by interface position
    c_blocks: Vec<SparseMatrix>,
    c_cols: Vec<SparseMatrix>,
    s_factor: Option<DenseCholesky>,
}

impl SchurSaddle {
    pub fn factor(p: &SparseMatrix, interior: Vec<Vec<usize>>, interface: Vec<usize>) -> Result<Self> {
        let n = p.nrows();
        let mut owner = vec![usize::MAX; n];
        for (g, dofs) in interior.iter().enumerate() {
            for &i in dofs {
                if i >= n || owner[i] != usize::MAX {
                    return Err(Error::InconsistentMaps(format!("dof {i} listed twice or out of range")));
                }
                owner[i] = g;
            }
        }
        for &i in &interface {
            if i >= n || owner[i] != usize::MAX {
                return Err(Error::InconsistentMaps(format!("interface dof {i} listed twice or out of range")));
            }
            owner[i] = interior.len();
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InconsistentMaps(format!("dof {i} is neither interior nor interface")));
        }
        for (i, j, v) in p.iter() {
            if v != 0.0 && owner[i] != owner[j] && owner[i] < interior.len() && owner[j] < interior.len() {
                return Err(Error::DomainViolation(format!(
                    "interior dofs {i} and {j} of different patches are coupled"
                )));
            }
        }

        let mut d_factors = Vec::with_capacity(interior.len());
        let mut c_blocks = Vec::with_capacity(interior.len());
        let mut c_cols = Vec::with_capacity(interior.len());
        let m = interface.len();
        let mut s = p.principal_submatrix(&interface).to_dense();
        for dofs in &interior {
            let d = BandedCholesky::factor(&p.principal_submatrix(dofs), None)?;
            let ct = p.submatrix(&interface, dofs);
            // S -= C_r^T D_r^{-1} C_r, one interface column at a time
            let c = ct.transpose();
            for j in 0..m {
                let col: Vec<f64> = (0..dofs.len()).map(|i| c.get(i, j)).collect();
                if col.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let z = d.solve(&col);
                let w = ct.matvec(&z);
                for i in 0..m {
                    s[(i, j)] -= w[i];
                }
            }
            d_factors.push(d);
            c_blocks.push(ct);
            c_cols.push(c);
        }
        let s = (&s + s.transpose()) * 0.5;
        let s_factor = if m > 0 {
            Some(DenseCholesky::factor(&s).map_err(|_| Error::IndefiniteSchur)?)
        } else {
            None
        };
        Ok(Self { n, interior, interface, d_factors, c_blocks, c_cols, s_factor })
    }

    pub fn interface_len(&self) -> usize {
        self.interface.len()
    }
}

impl FactorizedOperator for SchurSaddle {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = self.interface.iter().map(|&i| rhs[i]).collect();
        let mut f_parts = Vec::with_capacity(self.interior.len());
        for ((dofs, d), ct) in self.interior.iter().zip(&self.d_factors).zip(&self.c_blocks) {
            let f: Vec<f64> = dofs.iter().map(|&i| rhs[i]).collect();
            let z = d.solve(&f);
            for (gi, wi) in g.iter_mut().zip(ct.matvec(&z)) {
                *gi -= wi;
            }
            f_parts.push(f);
        }
        let y = match &self.s_factor {
            Some(s) => s.solve(&g),
            None => Vec::new(),
        };
        let mut x = vec![0.0; self.n];
        for (k, &i) in self.interface.iter().enumerate() {
            x[i] = y[k];
        }
        for (((dofs, d), c), mut f) in self.interior.iter().zip(&self.d_factors).zip(&self.c_cols).zip(f_parts) {
            if !y.is_empty() {
                let cy = c.matvec(&y);
                for (fi, ci) in f.iter_mut().zip(cy) {
                    *fi -= ci;
                }
            }
            for (&i, v) in dofs.iter().zip(d.solve(&f)) {
                x[i] = v;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn two_patch_1d() -> SparseMatrix {
        // two chains 0-1-2 and 3-4-5 coupled through interface dof 6
        let mut t = Vec::new();
        for i in 0..7 {
            t.push((i, i, 4.0));
        }
        for (a, b) in [(0, 1), (1, 2), (3, 4), (4, 5), (2, 6), (3, 6)] {
            t.push((a, b, 1.0));
            t.push((b, a, 1.0));
        }
        SparseMatrix::from_triplets(7, 7, &t)
    }

    #[test]
    fn matches_dense_solve() {
        let p = two_patch_1d();
        let s = SchurSaddle::factor(&p, vec![vec![0, 1, 2], vec![3, 4, 5]], vec![6]).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0];
        let x = s.solve(&b);
        let dense = p.to_dense().lu().solve(&DVector::from_column_slice(&b)).unwrap();
        for (a, e) in x.iter().zip(dense.iter()) {
            assert!((a - e).abs() < 1e-11);
        }
    }

    #[test]
    fn decoupled_and_interface_free() {
        let p = SparseMatrix::from_diagonal(&[2.0, 4.0, 8.0]);
        let s = SchurSaddle::factor(&p, vec![vec![0], vec![1]], vec![2]).unwrap();
        let s_single = SchurSaddle::factor(&p, vec![vec![0, 1, 2]], vec![]).unwrap();
        for solver in [&s, &s_single] {
            for v in solver.solve(&[2.0, 4.0, 8.0]) {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coupled_interiors_rejected() {
        let p = two_patch_1d();
        assert!(SchurSaddle::factor(&p, vec![vec![0, 1], vec![2, 3, 4, 5]], vec![6]).is_err());
    }

    #[test]
    fn indefinite_schur_detected() {
        let p = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(SchurSaddle::factor(&p, vec![vec![0]], vec![1]), Err(Error::IndefiniteSchur)));
    }
}
