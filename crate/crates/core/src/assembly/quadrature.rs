use crate::error::{Error, Result};
use crate::geometry::Patch;
use crate::spline::{linear_index, multi_index, SplineSpace};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Gauss-Legendre points and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    Ok((x, w))
}

/// Data of one quadrature point of an element.
pub(crate) struct QuadPoint {
    pub x: Vec<f64>,
    pub jac: DMatrix<f64>,
    /// Reference weight times `|det J|`.
    pub weight: f64,
    /// Tensor basis values of the element's local functions.
    pub values: Vec<f64>,
    /// Parametric gradients, `grads[a][l]`.
    pub grads: Vec<Vec<f64>>,
}

/// Element of a tensor mesh with its local functions.
pub(crate) struct Element {
    pub index: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Retained (reduced) index per local function, `None` when constrained.
    pub dofs: Vec<Option<usize>>,
    spans: Vec<usize>,
}

/// Tensor mesh traversal for a space mapped by a patch.
pub(crate) struct Mesh<'a> {
    pub space: &'a SplineSpace,
    pub patch: &'a Patch,
    spans: Vec<Vec<(usize, f64, f64)>>,
    rule: (Vec<f64>, Vec<f64>),
}

impl<'a> Mesh<'a> {
    pub fn new(space: &'a SplineSpace, patch: &'a Patch) -> Result<Self> {
        if space.dim() != patch.dim() {
            return Err(Error::LengthMismatch { expected: space.dim(), got: patch.dim() });
        }
        let spans = space.knot_vectors().iter().map(|k| k.elements()).collect();
        let pmax = space.degrees().into_iter().max().unwrap_or(1);
        Ok(Self { space, patch, spans, rule: gauss_legendre(pmax + 1)? })
    }

    pub fn element_dims(&self) -> Vec<usize> {
        self.spans.iter().map(|s| s.len()).collect()
    }

    pub fn element_count(&self) -> usize {
        self.element_dims().iter().product()
    }

    pub fn local_count(&self) -> usize {
        self.space.degrees().iter().map(|p| p + 1).product()
    }

    pub fn element(&self, e: usize) -> Element {
        let d = self.space.dim();
        let index = multi_index(e, &self.element_dims());
        let degrees = self.space.degrees();
        let spans: Vec<usize> = (0..d).map(|l| self.spans[l][index[l]].0).collect();
        let local: Vec<usize> = degrees.iter().map(|p| p + 1).collect();
        let dofs = (0..self.local_count())
            .map(|a| {
                let am = multi_index(a, &local);
                let full: Vec<usize> = (0..d).map(|l| spans[l] - degrees[l] + am[l]).collect();
                self.space.reduced_index(&full)
            })
            .collect();
        Element {
            lower: (0..d).map(|l| self.spans[l][index[l]].1).collect(),
            upper: (0..d).map(|l| self.spans[l][index[l]].2).collect(),
            index,
            dofs,
            spans,
        }
    }

    /// Tensor Gauss points of the box `[lower, upper]` inside element `el`.
    pub fn points(&self, el: &Element, lower: &[f64], upper: &[f64]) -> Result<Vec<QuadPoint>> {
        let d = self.space.dim();
        let (gx, gw) = &self.rule;
        let nq = gx.len();
        let degrees = self.space.degrees();
        let local: Vec<usize> = degrees.iter().map(|p| p + 1).collect();
        let nloc = self.local_count();
        // per direction, per 1D point: (coordinate, weight, [values, derivatives])
        let mut line = Vec::with_capacity(d);
        for l in 0..d {
            let (a, b) = (lower[l], upper[l]);
            let half = 0.5 * (b - a);
            let kv = self.space.knot_vector(l);
            let mut pts = Vec::with_capacity(nq);
            for q in 0..nq {
                let t = a + half * (gx[q] + 1.0);
                pts.push((t, gw[q] * half, kv.ders_at_span(el.spans[l], t, 1)?));
            }
            line.push(pts);
        }
        let local_index: Vec<Vec<usize>> = (0..nloc).map(|a| multi_index(a, &local)).collect();
        let qdims = vec![nq; d];
        let mut out = Vec::with_capacity(nq.pow(d as u32));
        for q in 0..nq.pow(d as u32) {
            let qm = multi_index(q, &qdims);
            let xhat: Vec<f64> = (0..d).map(|l| line[l][qm[l]].0).collect();
            let wref: f64 = (0..d).map(|l| line[l][qm[l]].1).product();
            let (x, jac) = self.patch.eval_with_jacobian(&xhat)?;
            let det = jac.determinant();
            if det.abs() < 1e-14 {
                return Err(Error::SingularJacobian { det: det.abs(), point: xhat });
            }
            let mut values = Vec::with_capacity(nloc);
            let mut grads = Vec::with_capacity(nloc);
            for am in &local_index {
                let ders = |l: usize, k: usize| line[l][qm[l]].2.get(k).map_or(0.0, |r| r[am[l]]);
                values.push((0..d).map(|l| ders(l, 0)).product());
                grads.push((0..d).map(|m| (0..d).map(|l| ders(l, usize::from(l == m))).product()).collect());
            }
            out.push(QuadPoint { x, jac, weight: wref * det.abs(), values, grads });
        }
        Ok(out)
    }

    /// Gauss points of the whole element.
    pub fn element_points(&self, el: &Element) -> Result<Vec<QuadPoint>> {
        self.points(el, &el.lower, &el.upper)
    }

    /// Gauss points of the `2^depth` subcells per direction whose mapped centre satisfies `keep`.
    pub fn subcell_points(
        &self,
        el: &Element,
        depth: usize,
        keep: &dyn Fn(&[f64]) -> bool,
    ) -> Result<Vec<QuadPoint>> {
        let d = self.space.dim();
        let per = 1usize << depth;
        let mut out = Vec::new();
        for c in 0..per.pow(d as u32) {
            let cm = multi_index(c, &vec![per; d]);
            let h: Vec<f64> = (0..d).map(|l| (el.upper[l] - el.lower[l]) / per as f64).collect();
            let lo: Vec<f64> = (0..d).map(|l| el.lower[l] + h[l] * cm[l] as f64).collect();
            let hi: Vec<f64> = (0..d).map(|l| lo[l] + h[l]).collect();
            let centre: Vec<f64> = (0..d).map(|l| 0.5 * (lo[l] + hi[l])).collect();
            if keep(&self.patch.eval(&centre)?) {
                out.extend(self.points(el, &lo, &hi)?);
            }
        }
        Ok(out)
    }

    /// Sparsity pattern of the tensor band `|i_l - j_l| <= p_l` over retained dofs.
    pub fn band_pattern(&self) -> (Vec<usize>, Vec<usize>) {
        let dims = self.space.dims();
        let p = self.space.degrees();
        let n = self.space.ndofs();
        let d = dims.len();
        let width: Vec<usize> = (0..d).map(|l| (2 * p[l] + 1).min(2 * dims[l])).collect();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        indptr.push(0);
        for i in 0..n {
            let mi = multi_index(i, &dims);
            let lo: Vec<usize> = (0..d).map(|l| mi[l].saturating_sub(p[l])).collect();
            let hi: Vec<usize> = (0..d).map(|l| (mi[l] + p[l]).min(dims[l] - 1)).collect();
            let ext: Vec<usize> = (0..d).map(|l| hi[l] - lo[l] + 1).collect();
            debug_assert!(ext.iter().zip(&width).all(|(e, w)| e <= w));
            for c in 0..ext.iter().product() {
                let cm = multi_index(c, &ext);
                let mj: Vec<usize> = (0..d).map(|l| lo[l] + cm[l]).collect();
                indices.push(linear_index(&mj, &dims));
            }
            indptr.push(indices.len());
        }
        (indptr, indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..=8 {
            let (x, w) = gauss_legendre(n).unwrap();
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        assert!(gauss_legendre(0).is_err());
    }
}
