use super::{FactorizedOperator, SparseMatrix};
use crate::error::{Error, Result};

/// Cholesky factor `A = L L^T` stored in lower band form.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // row i holds L[i, i-bw ..= i], left padded with zeros
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factor an SPD matrix. `bandwidth = None` uses the measured bandwidth.
    pub fn factor(a: &SparseMatrix, bandwidth: Option<usize>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::LengthMismatch { expected: n, got: a.ncols() });
        }
        let measured = a.bandwidth();
        let bw = bandwidth.unwrap_or(measured);
        if measured > bw {
            return Err(Error::DomainViolation(format!(
                "matrix bandwidth {measured} exceeds declared bandwidth {bw}"
            )));
        }
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for (i, j, v) in a.iter() {
            if j <= i {
                band[i * w + bw + j - i] = v;
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let jlo = j.saturating_sub(bw).max(lo);
                let ri = &band[i * w + bw + jlo - i..i * w + bw + j - i];
                let rj = &band[j * w + bw + jlo - j..j * w + bw];
                let s = band[i * w + bw + j - i] - unrolled_dot(ri, rj);
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    band[i * w + bw] = s.sqrt();
                } else {
                    band[i * w + bw + j - i] = s / band[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `L[i, j]`.
    pub fn l(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bw {
            0.0
        } else {
            self.band[i * (self.bw + 1) + self.bw + j - i]
        }
    }
}

// four accumulators so the compiler can vectorise the factorisation kernel
fn unrolled_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ta, tb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ta.iter().zip(tb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl FactorizedOperator for BandedCholesky {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i * w + bw + k - i] * y[k];
            }
            y[i] = s / self.band[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.band[k * w + bw + i - k] * y[k];
            }
            y[i] = s / self.band[i * w + bw];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_scalar() {
        let f = BandedCholesky::factor(&SparseMatrix::identity(3), Some(0)).unwrap();
        assert_eq!(f.solve(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let f = BandedCholesky::factor(&SparseMatrix::from_diagonal(&[4.0]), None).unwrap();
        assert_eq!(f.l(0, 0), 2.0);
    }

    #[test]
    fn pentadiagonal_residual() {
        // quadratic C^1 B-spline mass stencil on a uniform mesh, scaled
        let n = 10;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 66.0));
            if i + 1 < n {
                t.push((i, i + 1, 26.0));
                t.push((i + 1, i, 26.0));
            }
            if i + 2 < n {
                t.push((i, i + 2, 1.0));
                t.push((i + 2, i, 1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t);
        let f = BandedCholesky::factor(&a, Some(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = f.solve(&b);
        let r: f64 = a.matvec(&x).iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r / nb <= 1e-12);
    }

    #[test]
    fn indefinite_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(BandedCholesky::factor(&a, None), Err(Error::NotPositiveDefinite { row: 1, .. })));
    }

    #[test]
    fn declared_bandwidth_too_small() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (2, 2, 2.0), (1, 1, 2.0), (0, 2, 0.1), (2, 0, 0.1)]);
        assert!(BandedCholesky::factor(&a, Some(1)).is_err());
    }
}
