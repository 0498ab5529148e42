use super::Eigenpairs;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, FactorizedOperator, LinearOperator};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of the restarted Lanczos eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Number of wanted (largest) eigenpairs.
    pub k: usize,
    /// Basis size before a restart.
    pub m: usize,
    /// Relative residual tolerance `|A u - l B u| / (l |B u|)`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Orthogonalize every new vector against the whole basis (twice).
    pub full_reorth: bool,
}

impl LanczosConfig {
    /// `m = 2k`, tolerance `1e-3`.
    pub fn new(k: usize) -> Self {
        Self { k, m: 2 * k, tol: 1e-3, max_restarts: 500, full_reorth: true }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.m < self.k {
            return Err(Error::InvalidArgument(format!("need m >= k >= 1, got k={}, m={}", self.k, self.m)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Output of [`lanczos`].
#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// Largest eigenpairs, descending, vectors B-normalized.
    pub pairs: Eigenpairs,
    /// Exact relative residuals of the returned pairs.
    pub residuals: Vec<f64>,
    /// Lanczos steps (applications of `B^{-1} A` in the recurrence).
    pub iterations: usize,
    /// All applications of `A`, including the final residual checks.
    pub matvecs: usize,
    pub restarts: usize,
}

impl LanczosResult {
    pub fn converged(&self) -> bool {
        self.pairs.converged
    }

    /// The result, or [`Error::NoConvergence`] when some pair missed the tolerance.
    pub fn require_converged(self, tol: f64) -> Result<Self> {
        if self.converged() {
            return Ok(self);
        }
        let ok = self.residuals.iter().filter(|&&r| r <= tol).count();
        Err(Error::NoConvergence { converged: ok, wanted: self.residuals.len(), restarts: self.restarts })
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

struct Basis {
    v: Vec<Vec<f64>>,
    bv: Vec<Vec<f64>>,
}

impl Basis {
    /// Remove the B-components along the first `upto` vectors; returns the coefficients.
    fn orthogonalize(&self, w: &mut [f64], upto: usize, passes: usize) -> Vec<f64> {
        let mut h = vec![0.0; upto];
        for _ in 0..passes {
            for i in 0..upto {
                let c = dot(w, &self.bv[i]);
                axpy(w, -c, &self.v[i]);
                h[i] += c;
            }
        }
        h
    }

    fn combine(vs: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; vs[0].len()];
        for (v, &c) in vs.iter().zip(y) {
            axpy(&mut out, c, v);
        }
        out
    }
}

/// Largest eigenpairs of `A u = l B u` by Lanczos iteration in the B-inner product
/// with full reorthogonalization and thick restarts.
///
/// Breakdown is handled by continuing with a fresh random vector. When the
/// tolerance is not met after `max_restarts`, the best Ritz pairs are returned
/// with `converged = false`.
pub fn lanczos(
    a: &dyn LinearOperator,
    b_solve: &dyn FactorizedOperator,
    b_apply: &dyn LinearOperator,
    config: &LanczosConfig,
    seed: u64,
) -> Result<LanczosResult> {
    config.validate()?;
    let n = a.dim();
    if b_solve.dim() != n || b_apply.dim() != n {
        return Err(Error::LengthMismatch { expected: n, got: b_solve.dim() });
    }
    let k = config.k;
    if k > n {
        return Err(Error::InvalidRank { rank: k, dim: n });
    }
    let m = config.m.max(k + 1).min(n);
    let passes = if config.full_reorth { 2 } else { 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut basis = Basis { v: Vec::with_capacity(m + 1), bv: Vec::with_capacity(m + 1) };
    let random_vector = |rng: &mut ChaCha8Rng, basis: &Basis, upto: usize| -> Option<(Vec<f64>, Vec<f64>)> {
        for _ in 0..8 {
            let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            basis.orthogonalize(&mut w, upto, 2);
            let bw = b_apply.apply(&w);
            let s = dot(&w, &bw);
            if s > 0.0 && s.is_finite() {
                let s = s.sqrt();
                return Some((w.iter().map(|x| x / s).collect(), bw.iter().map(|x| x / s).collect()));
            }
        }
        None
    };
    let (v0, bv0) = random_vector(&mut rng, &basis, 0)
        .ok_or_else(|| Error::DomainViolation("B has no positive direction".into()))?;
    basis.v.push(v0);
    basis.bv.push(bv0);

    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut s = 0;
    let mut iterations = 0;
    let mut restarts = 0;
    loop {
        let mut beta = 0.0;
        while s < m {
            let ax = a.apply(&basis.v[s]);
            iterations += 1;
            let mut w = b_solve.solve(&ax);
            let before = dot(&ax, &w).abs().sqrt();
            let h = basis.orthogonalize(&mut w, s + 1, passes);
            for (i, &hi) in h.iter().enumerate() {
                t[(i, s)] = hi;
                t[(s, i)] = hi;
            }
            let bw = b_apply.apply(&w);
            beta = dot(&w, &bw).max(0.0).sqrt();
            let (next, bnext) = if s + 1 == n {
                beta = 0.0;
                (vec![0.0; n], vec![0.0; n])
            } else if beta <= 1e-10 * before || beta == 0.0 {
                beta = 0.0;
                random_vector(&mut rng, &basis, s + 1).unwrap_or((vec![0.0; n], vec![0.0; n]))
            } else {
                (w.iter().map(|x| x / beta).collect(), bw.iter().map(|x| x / beta).collect())
            };
            basis.v.truncate(s + 1);
            basis.bv.truncate(s + 1);
            basis.v.push(next);
            basis.bv.push(bnext);
            s += 1;
        }

        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let top = &order[..k];
        let bnext_norm = norm(&basis.bv[m]);
        let mut estimates = Vec::with_capacity(k);
        let mut ritz = Vec::with_capacity(k);
        for &c in top {
            let theta = eig.eigenvalues[c];
            let y: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let bu = Basis::combine(&basis.bv[..m], &y);
            let est = (beta * y[m - 1]).abs() * bnext_norm / (theta.abs() * norm(&bu)).max(f64::MIN_POSITIVE);
            estimates.push(if theta > 0.0 { est } else { f64::INFINITY });
            ritz.push((theta, y, bu));
        }
        let done = estimates.iter().all(|&r| r <= config.tol);
        if done || restarts >= config.max_restarts {
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for (theta, y, bu) in &ritz {
                let u = Basis::combine(&basis.v[..m], y);
                let au = a.apply(&u);
                let r: Vec<f64> = au.iter().zip(bu).map(|(x, b)| x - theta * b).collect();
                residuals.push(norm(&r) / (theta.abs() * norm(bu)).max(f64::MIN_POSITIVE));
                values.push(*theta);
                vectors.push(u);
            }
            // guard the estimate against loss of orthogonality
            let exact_ok = residuals.iter().all(|&r| r <= config.tol * 1.01 + 1e-12);
            if exact_ok || restarts >= config.max_restarts {
                let matvecs = iterations + k;
                let converged = done && exact_ok;
                return Ok(LanczosResult {
                    pairs: Eigenpairs { values, vectors, converged },
                    residuals,
                    iterations,
                    matvecs,
                    restarts,
                });
            }
        }

        // thick restart: keep the top k Ritz vectors and the next Krylov direction
        restarts += 1;
        let mut nv = Vec::with_capacity(m + 1);
        let mut nbv = Vec::with_capacity(m + 1);
        for (_, y, bu) in &ritz {
            nv.push(Basis::combine(&basis.v[..m], y));
            nbv.push(bu.clone());
        }
        nv.push(basis.v[m].clone());
        nbv.push(basis.bv[m].clone());
        basis = Basis { v: nv, bv: nbv };
        t.fill(0.0);
        for (i, (theta, _, _)) in ritz.iter().enumerate() {
            t[(i, i)] = *theta;
        }
        s = k;
        if norm(&basis.v[k]) == 0.0 {
            // exhausted or broken down at the restart boundary
            let fresh = random_vector(&mut rng, &basis, k);
            match fresh {
                Some((v, bv)) => {
                    basis.v[k] = v;
                    basis.bv[k] = bv;
                }
                None => {
                    // the kept vectors span an invariant subspace of full dimension
                    restarts = config.max_restarts;
                }
            }
        }
    }
}
