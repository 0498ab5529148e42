use super::lanczos::{lanczos, LanczosConfig, LanczosResult};
use super::Eigenpairs;
use crate::error::{Error, Result};
use crate::geometry::DofMap;
use crate::linalg::{FactorizedOperator, LinearOperator, SparseMatrix, WoodburySolver};
use nalgebra::DMatrix;

/// Which side of the pencil absorbs the low-rank modification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeflationMode {
    /// `A + V f(D2) V^T` with `f(l) = l_cut - l`.
    ScaleStiffness,
    /// `B + V g(D2) V^T` with `g(l) = l / l_cut - 1`.
    ScaleMass,
}

/// Pencil whose top `r` eigenvalues are mapped to `l_cut = l_{n-r}` by a rank-`r`
/// modification along `V = B U2`; eigenvectors are unchanged.
#[derive(Debug, Clone)]
pub struct ScaledPencil<'a> {
    pub a: &'a SparseMatrix,
    pub b: &'a SparseMatrix,
    /// B-orthonormal eigenvectors of the deflated eigenvalues (columns).
    pub u2: DMatrix<f64>,
    /// `B U2`.
    pub v: DMatrix<f64>,
    /// Deflated eigenvalues, ascending.
    pub d2: Vec<f64>,
    pub lambda_cut: f64,
    pub mode: DeflationMode,
}

/// Deflate the top `r` eigenvalues of `(A, B)` using the top `r + 1` eigenpairs.
pub fn deflate<'a>(
    a: &'a SparseMatrix,
    b: &'a SparseMatrix,
    r: usize,
    mode: DeflationMode,
    pairs: &Eigenpairs,
) -> Result<ScaledPencil<'a>> {
    let n = a.nrows();
    if r >= n {
        return Err(Error::InvalidRank { rank: r, dim: n });
    }
    if !pairs.converged {
        return Err(Error::UnconvergedEigendata("eigenpairs did not meet the solver tolerance".into()));
    }
    if pairs.values.len() < r + 1 {
        return Err(Error::InvalidArgument(format!("deflating rank {r} needs {} eigenpairs, got {}", r + 1, pairs.values.len())));
    }
    let desc = pairs.descending();
    let lambda_cut = desc[r].0;
    // ascending order of the deflated part
    let top: Vec<_> = desc[..r].iter().rev().collect();
    let mut u2 = DMatrix::zeros(n, r);
    for (j, (_, u)) in top.iter().enumerate() {
        if u.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: u.len() });
        }
        u2.set_column(j, &nalgebra::DVector::from_column_slice(u));
    }
    let mut v = DMatrix::zeros(n, r);
    for j in 0..r {
        let col: Vec<f64> = u2.column(j).iter().copied().collect();
        v.set_column(j, &nalgebra::DVector::from_vec(b.matvec(&col)));
    }
    Ok(ScaledPencil { a, b, u2, v, d2: top.iter().map(|(l, _)| *l).collect(), lambda_cut, mode })
}

impl ScaledPencil<'_> {
    pub fn rank(&self) -> usize {
        self.d2.len()
    }

    /// `f(D2)` for the stiffness side (zero in mass mode).
    pub fn f(&self) -> Vec<f64> {
        match self.mode {
            DeflationMode::ScaleStiffness => self.d2.iter().map(|l| self.lambda_cut - l).collect(),
            DeflationMode::ScaleMass => vec![0.0; self.rank()],
        }
    }

    /// `g(D2)` for the mass side (zero in stiffness mode).
    pub fn g(&self) -> Vec<f64> {
        match self.mode {
            DeflationMode::ScaleStiffness => vec![0.0; self.rank()],
            DeflationMode::ScaleMass => self.d2.iter().map(|l| l / self.lambda_cut - 1.0).collect(),
        }
    }

    fn low_rank_apply(&self, base: &SparseMatrix, c: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = base.matvec(x);
        for (j, &cj) in c.iter().enumerate() {
            let col = self.v.column(j);
            let t = cj * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            for (yi, vi) in y.iter_mut().zip(col.iter()) {
                *yi += t * vi;
            }
        }
        y
    }

    /// `A-bar x`.
    pub fn stiffness_apply(&self, x: &[f64]) -> Vec<f64> {
        self.low_rank_apply(self.a, &self.f(), x)
    }

    /// `B-bar x`.
    pub fn mass_apply(&self, x: &[f64]) -> Vec<f64> {
        self.low_rank_apply(self.b, &self.g(), x)
    }

    fn dense_with(&self, base: &SparseMatrix, c: &[f64]) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(c));
        base.to_dense() + &self.v * d * self.v.transpose()
    }

    /// Explicit `A-bar`; only for small oracle checks.
    pub fn dense_stiffness(&self) -> DMatrix<f64> {
        self.dense_with(self.a, &self.f())
    }

    /// Explicit `B-bar`; only for small oracle checks.
    pub fn dense_mass(&self) -> DMatrix<f64> {
        self.dense_with(self.b, &self.g())
    }

    /// Largest eigenvalue of the deflated pencil.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_cut
    }
}

/// Solver for `B-bar` through a factorization of `B` and the Woodbury identity.
///
/// Directions with `g = 0` (eigenvalues equal to `l_cut`) leave `B` unchanged and are skipped.
pub fn scaled_mass_solver<'a>(pencil: &ScaledPencil<'_>, base: &'a dyn FactorizedOperator) -> Result<WoodburySolver<'a>> {
    if pencil.mode != DeflationMode::ScaleMass {
        return Err(Error::InvalidArgument("scaled mass solve needs a scale-mass pencil".into()));
    }
    let g = pencil.g();
    let keep: Vec<usize> = (0..g.len()).filter(|&j| g[j] != 0.0).collect();
    let u = pencil.u2.select_columns(&keep);
    let gk: Vec<f64> = keep.iter().map(|&j| g[j]).collect();
    WoodburySolver::new(base, u, &gk)
}

/// `B-bar^{-1} rhs` for a scale-mass pencil.
pub fn scaled_mass_solve(pencil: &ScaledPencil<'_>, base: &dyn FactorizedOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != base.dim() {
        return Err(Error::LengthMismatch { expected: base.dim(), got: rhs.len() });
    }
    Ok(scaled_mass_solver(pencil, base)?.solve(rhs))
}

/// Sparse matrix plus a symmetric low-rank term `A + V diag(c) V^T`.
#[derive(Debug, Clone)]
pub struct LowRankSum {
    pub base: SparseMatrix,
    pub v: DMatrix<f64>,
    pub coeff: Vec<f64>,
}

impl LowRankSum {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.coeff));
        self.base.to_dense() + &self.v * d * self.v.transpose()
    }

    pub fn rank(&self) -> usize {
        self.coeff.len()
    }
}

impl LinearOperator for LowRankSum {
    fn dim(&self) -> usize {
        self.base.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.base.matvec(x);
        for (j, &c) in self.coeff.iter().enumerate() {
            let col = self.v.column(j);
            let t = c * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            for (yi, vi) in y.iter_mut().zip(col.iter()) {
                *yi += t * vi;
            }
        }
        y
    }
}

/// Patchwise stiffness scaling `K_r + V f(D2) V^T` with `f(l) = l_cut - l <= 0`,
/// using Lanczos on the local pencil `(K_r, P_r)`.
pub fn local_stiffness_scale(
    k_r: &SparseMatrix,
    p_r: &SparseMatrix,
    p_solve: &dyn FactorizedOperator,
    rank: usize,
    tol: f64,
    seed: u64,
) -> Result<(LowRankSum, LanczosResult)> {
    let n = k_r.nrows();
    if rank == 0 {
        let empty = LanczosResult {
            pairs: Eigenpairs { values: vec![], vectors: vec![], converged: true },
            residuals: vec![],
            iterations: 0,
            matvecs: 0,
            restarts: 0,
        };
        return Ok((LowRankSum { base: k_r.clone(), v: DMatrix::zeros(n, 0), coeff: vec![] }, empty));
    }
    if rank >= n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let cfg = LanczosConfig::new(rank + 1).with_tol(tol);
    let result = lanczos(k_r, p_solve, p_r, &cfg, seed)?.require_converged(tol)?;
    let pencil = deflate(k_r, p_r, rank, DeflationMode::ScaleStiffness, &result.pairs)?;
    let scaled = LowRankSum { base: k_r.clone(), v: pencil.v.clone(), coeff: pencil.f() };
    Ok((scaled, result))
}

/// Global `sum R_r^T K-bar_r R_r` of patchwise scaled stiffness matrices.
pub fn assemble_low_rank(locals: &[LowRankSum], map: &DofMap) -> Result<LowRankSum> {
    if locals.len() != map.local_to_global.len() {
        return Err(Error::InconsistentMaps(format!("{} local operators for {} patches", locals.len(), map.local_to_global.len())));
    }
    let n = map.ndofs;
    let mut t = Vec::new();
    let total: usize = locals.iter().map(|l| l.rank()).sum();
    let mut v = DMatrix::zeros(n, total);
    let mut coeff = Vec::with_capacity(total);
    let mut col = 0;
    for (local, l2g) in locals.iter().zip(&map.local_to_global) {
        if local.base.nrows() != l2g.len() {
            return Err(Error::InconsistentMaps(format!("operator of size {} for {} mapped dofs", local.base.nrows(), l2g.len())));
        }
        t.extend(local.base.iter().map(|(i, j, x)| (l2g[i], l2g[j], x)));
        for j in 0..local.rank() {
            for (i, &g) in l2g.iter().enumerate() {
                v[(g, col)] += local.v[(i, j)];
            }
            coeff.push(local.coeff[j]);
            col += 1;
        }
    }
    Ok(LowRankSum { base: SparseMatrix::from_triplets(n, n, &t), v, coeff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_generalized_eig, dense_generalized_eigvals, DenseCholesky, DiagonalSolver};
    use crate::spectral::dense_top_pairs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> SparseMatrix {
        let x = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SparseMatrix::from_dense(&(&x * x.transpose() + DMatrix::identity(n, n) * shift), 0.0)
    }

    #[test]
    fn rank_zero_is_identity_map() {
        let a = SparseMatrix::from_diagonal(&[1.0, 2.0, 10.0]);
        let b = SparseMatrix::identity(3);
        let pairs = dense_top_pairs(&a, &b, 1).unwrap();
        let p = deflate(&a, &b, 0, DeflationMode::ScaleMass, &pairs).unwrap();
        assert_eq!(p.lambda_cut, 10.0);
        assert_eq!(p.dense_mass(), b.to_dense());
        let base = DiagonalSolver::new(vec![1.0; 3]).unwrap();
        assert_eq!(scaled_mass_solve(&p, &base, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn diagonal_example_both_modes() {
        let a = SparseMatrix::from_diagonal(&[1.0, 2.0, 10.0]);
        let b = SparseMatrix::identity(3);
        let pairs = dense_top_pairs(&a, &b, 2).unwrap();
        for mode in [DeflationMode::ScaleStiffness, DeflationMode::ScaleMass] {
            let p = deflate(&a, &b, 1, mode, &pairs).unwrap();
            let ev = dense_generalized_eigvals(&p.dense_stiffness(), &p.dense_mass()).unwrap();
            for (x, want) in ev.iter().zip([1.0, 2.0, 2.0]) {
                assert!((x - want).abs() < 1e-12);
            }
        }
        assert!(deflate(&a, &b, 3, DeflationMode::ScaleMass, &pairs).is_err());
        let bad = Eigenpairs { converged: false, ..pairs.clone() };
        assert!(matches!(deflate(&a, &b, 1, DeflationMode::ScaleMass, &bad), Err(Error::UnconvergedEigendata(_))));
    }

    #[test]
    fn deflation_on_random_pencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 40;
        let a = random_spd(n, 0.1, &mut rng);
        let b = random_spd(n, 2.0, &mut rng);
        let r = 6;
        let full = dense_generalized_eig(&a.to_dense(), &b.to_dense()).unwrap();
        let pairs = dense_top_pairs(&a, &b, r + 1).unwrap();
        for mode in [DeflationMode::ScaleStiffness, DeflationMode::ScaleMass] {
            let p = deflate(&a, &b, r, mode, &pairs).unwrap();
            let ev = dense_generalized_eigvals(&p.dense_stiffness(), &p.dense_mass()).unwrap();
            let cut = full.values[n - r - 1];
            for kk in 0..n {
                let want = if kk < n - r { full.values[kk] } else { cut };
                assert!((ev[kk] - want).abs() <= 1e-8 * want.abs());
            }
        }
    }

    #[test]
    fn scaled_mass_solve_on_eigenvectors_and_random_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 30;
        let a = random_spd(n, 0.1, &mut rng);
        let b = random_spd(n, 2.0, &mut rng);
        let pairs = dense_top_pairs(&a, &b, 5).unwrap();
        let p = deflate(&a, &b, 4, DeflationMode::ScaleMass, &pairs).unwrap();
        let base = DenseCholesky::factor(&b.to_dense()).unwrap();
        for j in 0..4 {
            let u: Vec<f64> = p.u2.column(j).iter().copied().collect();
            let rhs: Vec<f64> = b.matvec(&u).iter().map(|x| x * p.d2[j] / p.lambda_cut).collect();
            let x = scaled_mass_solve(&p, &base, &rhs).unwrap();
            for (xi, ui) in x.iter().zip(&u) {
                assert!((xi - ui).abs() < 1e-8);
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = scaled_mass_solve(&p, &base, &rhs).unwrap();
        let dense = DenseCholesky::factor(&p.dense_mass()).unwrap().solve(&rhs);
        let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&dense) {
            assert!((u - v).abs() <= 1e-10 * scale);
        }
        let stiff = deflate(&a, &b, 4, DeflationMode::ScaleStiffness, &pairs).unwrap();
        assert!(scaled_mass_solve(&stiff, &base, &rhs).is_err());
    }

    #[test]
    fn local_scaling_is_negative_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 50;
        let k = random_spd(n, 0.0, &mut rng);
        let p = random_spd(n, 3.0, &mut rng);
        let f = DenseCholesky::factor(&p.to_dense()).unwrap();
        let (kbar, res) = local_stiffness_scale(&k, &p, &f, 5, 1e-10, 1).unwrap();
        assert!(res.converged());
        assert!(kbar.coeff.iter().all(|&c| c <= 0.0));
        let diff = k.to_dense() - kbar.to_dense();
        for _ in 0..100 {
            let x = nalgebra::DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            assert!((x.transpose() * &diff * &x)[(0, 0)] >= -1e-10);
        }
        let before = dense_generalized_eigvals(&k.to_dense(), &p.to_dense()).unwrap();
        let after = dense_generalized_eigvals(&kbar.to_dense(), &p.to_dense()).unwrap();
        assert!((after[n - 1] - before[n - 6]).abs() <= 1e-8 * before[n - 6]);
        let (same, _) = local_stiffness_scale(&k, &p, &f, 0, 1e-10, 1).unwrap();
        assert_eq!(same.to_dense(), k.to_dense());
    }
}
