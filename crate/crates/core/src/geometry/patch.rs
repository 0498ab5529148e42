use crate::error::{Error, Result};
use crate::spline::KnotVector;
use nalgebra::DMatrix;

/// Scalar coefficient field evaluated at physical points.
pub type Field<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Tensor-product B-spline or NURBS map from `[0,1]^d` to `R^d`.
///
/// Control points are stored lexicographically with direction 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    knots: Vec<KnotVector>,
    control: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
}

impl Patch {
    pub fn new(knots: Vec<KnotVector>, control: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let d = knots.len();
        let count: usize = knots.iter().map(|k| k.dim()).product();
        if control.len() != count {
            return Err(Error::LengthMismatch { expected: count, got: control.len() });
        }
        if let Some(bad) = control.iter().find(|c| c.len() != d) {
            return Err(Error::LengthMismatch { expected: d, got: bad.len() });
        }
        if let Some(w) = &weights {
            if w.len() != count {
                return Err(Error::LengthMismatch { expected: count, got: w.len() });
            }
            if let Some(&bad) = w.iter().find(|&&x| !(x > 0.0)) {
                return Err(Error::DomainViolation(format!("weight {bad} is not positive")));
            }
        }
        Ok(Self { knots, control, weights })
    }

    /// Degree-1 single-element map of the box `[lower, upper]`.
    pub fn axis_box(lower: &[f64], upper: &[f64]) -> Self {
        let d = lower.len();
        let kv = KnotVector::new(vec![0.0, 0.0, 1.0, 1.0], 1).expect("valid linear knots");
        let control = (0..1usize << d)
            .map(|c| {
                (0..d)
                    .map(|l| if (c >> (d - 1 - l)) & 1 == 1 { upper[l] } else { lower[l] })
                    .collect()
            })
            .collect();
        Self { knots: vec![kv; d], control, weights: None }
    }

    /// Identity map of the unit box.
    pub fn identity(d: usize) -> Self {
        Self::axis_box(&vec![0.0; d], &vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn knot_vectors(&self) -> &[KnotVector] {
        &self.knots
    }

    pub fn control_points(&self) -> &[Vec<f64>] {
        &self.control
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.weights.is_some()
    }

    /// Map value and Jacobian (column `l` is the derivative along direction `l`).
    pub fn eval_with_jacobian(&self, xhat: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let d = self.dim();
        if xhat.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: xhat.len() });
        }
        let mut first = Vec::with_capacity(d);
        let mut ders = Vec::with_capacity(d);
        for (kv, &x) in self.knots.iter().zip(xhat) {
            let span = kv.find_span(x)?;
            first.push(span - kv.degree());
            ders.push(kv.ders_at_span(span, x, 1)?);
        }
        let dims: Vec<usize> = self.knots.iter().map(|k| k.dim()).collect();
        let local: Vec<usize> = self.knots.iter().map(|k| k.degree() + 1).collect();
        let total: usize = local.iter().product();
        let mut w_sum = 0.0;
        let mut dw = vec![0.0; d];
        let mut s = vec![0.0; d];
        let mut ds = vec![vec![0.0; d]; d];
        let mut a = vec![0usize; d];
        for _ in 0..total {
            let mut g = 0;
            for l in 0..d {
                g = g * dims[l] + first[l] + a[l];
            }
            let w = self.weights.as_ref().map_or(1.0, |w| w[g]);
            let n: f64 = (0..d).map(|l| ders[l][0][a[l]]).product();
            let p = &self.control[g];
            w_sum += w * n;
            for (c, pc) in s.iter_mut().zip(p) {
                *c += w * n * pc;
            }
            for m in 0..d {
                let dn: f64 = (0..d).map(|l| ders[l][usize::from(l == m)][a[l]]).product();
                dw[m] += w * dn;
                for c in 0..d {
                    ds[m][c] += w * dn * p[c];
                }
            }
            for l in (0..d).rev() {
                a[l] += 1;
                if a[l] < local[l] {
                    break;
                }
                a[l] = 0;
            }
        }
        let point: Vec<f64> = s.iter().map(|v| v / w_sum).collect();
        let mut jac = DMatrix::zeros(d, d);
        for m in 0..d {
            for c in 0..d {
                jac[(c, m)] = (ds[m][c] - point[c] * dw[m]) / w_sum;
            }
        }
        Ok((point, jac))
    }

    pub fn eval(&self, xhat: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval_with_jacobian(xhat)?.0)
    }
}

/// Jacobian matrix and its determinant at a parametric point.
pub fn jacobian(patch: &Patch, xhat: &[f64]) -> Result<(DMatrix<f64>, f64)> {
    let (_, j) = patch.eval_with_jacobian(xhat)?;
    let det = j.determinant();
    Ok((j, det))
}

/// Pulled-back mass and stiffness coefficients `c = rho |det J|` and
/// `G = kappa |det J| (J^T J)^{-1}` at a parametric point.
pub fn pullback_coeffs(patch: &Patch, rho: Field, kappa: Field, xhat: &[f64]) -> Result<(f64, DMatrix<f64>)> {
    let (x, j) = patch.eval_with_jacobian(xhat)?;
    pullback_from_jacobian(&x, &j, rho, kappa, xhat)
}

pub(crate) fn pullback_from_jacobian(
    x: &[f64],
    j: &DMatrix<f64>,
    rho: Field,
    kappa: Field,
    xhat: &[f64],
) -> Result<(f64, DMatrix<f64>)> {
    let det = j.determinant();
    if det.abs() < 1e-14 {
        return Err(Error::SingularJacobian { det: det.abs(), point: xhat.to_vec() });
    }
    let jinv = j.clone().try_inverse().ok_or(Error::SingularJacobian { det: det.abs(), point: xhat.to_vec() })?;
    let g = &jinv * jinv.transpose() * (kappa(x) * det.abs());
    let g = (&g + g.transpose()) * 0.5;
    Ok((rho(x) * det.abs(), g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: &[f64]) -> f64 {
        1.0
    }

    #[test]
    fn identity_patch() {
        let p = Patch::identity(2);
        let (j, det) = jacobian(&p, &[0.3, 0.8]).unwrap();
        assert!((j - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((det - 1.0).abs() < 1e-15);
        let (c, g) = pullback_coeffs(&p, &one, &one, &[0.3, 0.8]).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        assert!((g - DMatrix::identity(2, 2)).amax() < 1e-15);
        let x = p.eval(&[0.3, 0.8]).unwrap();
        assert!((x[0] - 0.3).abs() < 1e-15 && (x[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn affine_stretch() {
        let p = Patch::axis_box(&[0.0, 0.0], &[2.0, 1.0]);
        for xhat in [[0.0, 0.0], [0.5, 0.25], [1.0, 1.0]] {
            let (_, det) = jacobian(&p, &xhat).unwrap();
            assert!((det - 2.0).abs() < 1e-13);
        }
        let (_, g) = pullback_coeffs(&p, &one, &one, &[0.5, 0.5]).unwrap();
        // J = diag(2,1): G = 2 diag(1/4, 1)
        assert!((g[(0, 0)] - 0.5).abs() < 1e-15 && (g[(1, 1)] - 2.0).abs() < 1e-15);
        assert!(g[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn density_at_origin() {
        let rho = |x: &[f64]| (x[0] * x[1]).sin().abs() + x[0] + x[1] + 1.0;
        let (c, _) = pullback_coeffs(&Patch::identity(2), &rho, &one, &[0.0, 0.0]).unwrap();
        assert_eq!(c, 1.0);
    }

    #[test]
    fn degenerate_map_rejected() {
        let p = Patch::axis_box(&[0.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(pullback_coeffs(&p, &one, &one, &[0.5, 0.5]), Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn bad_weights_rejected() {
        let kv = KnotVector::new(vec![0.0, 0.0, 1.0, 1.0], 1).unwrap();
        let r = Patch::new(vec![kv], vec![vec![0.0], vec![1.0]], Some(vec![1.0, 0.0]));
        assert!(r.is_err());
    }
}
