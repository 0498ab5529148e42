use super::knots::{make_open_uniform, KnotVector};
use crate::error::{Error, Result};

/// Boundary treatment of one face of the parametric box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceBc {
    /// Basis functions touching the face are eliminated (homogeneous Dirichlet).
    Dirichlet,
    #[default]
    Free,
}

/// Tensor-product B-spline space with per-face boundary conditions.
///
/// Direction 0 is the outermost (slowest) index of the lexicographic dof
/// numbering, so the top level of the block hierarchy follows direction 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    knots: Vec<KnotVector>,
    bc: Vec<[FaceBc; 2]>,
}

impl SplineSpace {
    pub fn new(knots: Vec<KnotVector>) -> Self {
        let d = knots.len();
        Self { knots, bc: vec![[FaceBc::Free; 2]; d] }
    }

    /// Same open uniform knot vector in every direction.
    pub fn uniform(dim: usize, elements: usize, p: usize, k: usize) -> Result<Self> {
        let kv = make_open_uniform(elements, p, k)?;
        Ok(Self::new(vec![kv; dim]))
    }

    /// Open uniform knot vectors with per-direction element counts.
    pub fn uniform_aniso(elements: &[usize], p: usize, k: usize) -> Result<Self> {
        let knots = elements
            .iter()
            .map(|&e| make_open_uniform(e, p, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(knots))
    }

    pub fn with_bc(mut self, bc: Vec<[FaceBc; 2]>) -> Result<Self> {
        if bc.len() != self.knots.len() {
            return Err(Error::LengthMismatch { expected: self.knots.len(), got: bc.len() });
        }
        self.bc = bc;
        Ok(self)
    }

    /// Dirichlet on every face.
    pub fn with_dirichlet(self) -> Self {
        let d = self.dim();
        self.with_bc(vec![[FaceBc::Dirichlet; 2]; d]).expect("matching length")
    }

    pub fn set_face(&mut self, direction: usize, side: usize, bc: FaceBc) {
        self.bc[direction][side] = bc;
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn knot_vector(&self, direction: usize) -> &KnotVector {
        &self.knots[direction]
    }

    pub fn knot_vectors(&self) -> &[KnotVector] {
        &self.knots
    }

    pub fn bc(&self) -> &[[FaceBc; 2]] {
        &self.bc
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.knots.iter().map(|k| k.degree()).collect()
    }

    /// Unconstrained dimension per direction.
    pub fn full_dims(&self) -> Vec<usize> {
        self.knots.iter().map(|k| k.dim()).collect()
    }

    /// First retained index per direction (1 when the left face is constrained).
    pub fn offsets(&self) -> Vec<usize> {
        self.bc.iter().map(|f| usize::from(f[0] == FaceBc::Dirichlet)).collect()
    }

    /// Dimension per direction after eliminating constrained functions.
    pub fn dims(&self) -> Vec<usize> {
        self.knots
            .iter()
            .zip(&self.bc)
            .map(|(k, f)| {
                let drop = f.iter().filter(|&&b| b == FaceBc::Dirichlet).count();
                k.dim().saturating_sub(drop)
            })
            .collect()
    }

    /// Total number of retained dofs.
    pub fn ndofs(&self) -> usize {
        self.dims().iter().product()
    }

    /// Smoothness per direction, taken as `p - max interior multiplicity`.
    pub fn continuities(&self) -> Vec<usize> {
        self.knots
            .iter()
            .map(|kv| {
                let p = kv.degree();
                let t = kv.knots();
                let interior = &t[p + 1..t.len() - p - 1];
                let mut m = 0;
                let mut i = 0;
                while i < interior.len() {
                    let j = interior[i..].iter().take_while(|&&x| x == interior[i]).count();
                    m = m.max(j);
                    i += j;
                }
                if m == 0 {
                    p.saturating_sub(1)
                } else {
                    p - m
                }
            })
            .collect()
    }

    /// Bandwidth per direction of the hierarchical mass structure.
    pub fn bandwidths(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .zip(self.dims())
            .map(|(&p, n)| p.min(n.saturating_sub(1)))
            .collect()
    }

    pub fn eval_basis(&self, direction: usize, x: f64, deriv_order: usize) -> Result<(usize, Vec<f64>)> {
        if direction >= self.dim() {
            return Err(Error::IndexOutOfRange { index: direction, max: self.dim() - 1 });
        }
        self.knots[direction].eval(x, deriv_order)
    }

    /// Map a full (unconstrained) multi-index to the retained linear index, if retained.
    pub fn reduced_index(&self, full: &[usize]) -> Option<usize> {
        let dims = self.dims();
        let off = self.offsets();
        let mut idx = 0;
        for l in 0..self.dim() {
            let i = full[l].checked_sub(off[l])?;
            if i >= dims[l] {
                return None;
            }
            idx = idx * dims[l] + i;
        }
        Some(idx)
    }

    /// Full multi-index of a retained linear index.
    pub fn full_multi_index(&self, reduced: usize) -> Vec<usize> {
        let off = self.offsets();
        let mut mi = multi_index(reduced, &self.dims());
        for (m, o) in mi.iter_mut().zip(off) {
            *m += o;
        }
        mi
    }
}

/// Lexicographic multi-index of `linear` with the first direction most significant.
pub fn multi_index(mut linear: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for l in (0..dims.len()).rev() {
        out[l] = linear % dims[l];
        linear /= dims[l];
    }
    out
}

pub fn linear_index(multi: &[usize], dims: &[usize]) -> usize {
    multi.iter().zip(dims).fold(0, |acc, (&i, &n)| acc * n + i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_size_at_six_subdivisions() {
        let s = SplineSpace::uniform(3, 6, 2, 1).unwrap().with_dirichlet();
        assert_eq!(s.dims(), vec![6, 6, 6]);
        assert_eq!(s.ndofs(), 216);
        assert_eq!(s.continuities(), vec![1, 1, 1]);
    }

    #[test]
    fn reduced_index_skips_constrained() {
        let s = SplineSpace::uniform(2, 2, 2, 1).unwrap().with_dirichlet();
        assert_eq!(s.full_dims(), vec![4, 4]);
        assert_eq!(s.reduced_index(&[0, 1]), None);
        assert_eq!(s.reduced_index(&[1, 1]), Some(0));
        assert_eq!(s.reduced_index(&[2, 2]), Some(3));
        assert_eq!(s.full_multi_index(3), vec![2, 2]);
    }

    /// Count basis functions by running the recursion on a dense sample grid.
    fn count_by_recursion(kv: &KnotVector) -> usize {
        let mut seen = vec![false; kv.knots().len()];
        for s in 0..=4000 {
            let x = s as f64 / 4000.0;
            let (first, vals) = kv.eval(x, 0).unwrap();
            for (j, v) in vals.iter().enumerate() {
                if *v > 1e-13 {
                    seen[first + j] = true;
                }
            }
        }
        seen.iter().filter(|&&b| b).count()
    }

    #[test]
    fn dimension_formula_matches_recursion() {
        for n in 1..=8 {
            for p in 1..=4 {
                for k in 0..p {
                    let kv = make_open_uniform(n, p, k).unwrap();
                    assert_eq!(kv.dim(), n * (p - k) + k + 1);
                    assert_eq!(count_by_recursion(&kv), kv.dim(), "N={n} p={p} k={k}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_nonnegativity(n in 1usize..9, p in 1usize..5, kk in 0usize..4, x in 0.0f64..=1.0) {
            let k = kk % p;
            let kv = make_open_uniform(n, p, k).unwrap();
            let (_, v) = kv.eval(x, 0).unwrap();
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(v.iter().all(|&b| b >= -1e-14));
        }

        #[test]
        fn derivative_matches_central_difference(n in 1usize..9, p in 1usize..5, kk in 0usize..4, x in 0.01f64..0.99) {
            let k = kk % p;
            let kv = make_open_uniform(n, p, k).unwrap();
            // keep the stencil inside one knot span so the difference is smooth
            let span_x = kv.find_span(x).unwrap();
            let h = 1e-6;
            prop_assume!(kv.find_span(x - h).unwrap() == span_x && kv.find_span(x + h).unwrap() == span_x);
            let (f, d) = kv.eval(x, 1).unwrap();
            let (fp, vp) = kv.eval(x + h, 0).unwrap();
            let (fm, vm) = kv.eval(x - h, 0).unwrap();
            prop_assert_eq!(f, fp);
            prop_assert_eq!(f, fm);
            let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            for j in 0..=p {
                let fd = (vp[j] - vm[j]) / (2.0 * h);
                prop_assert!((fd - d[j]).abs() <= 1e-5 * scale, "j={} fd={} d={}", j, fd, d[j]);
            }
        }

        #[test]
        fn multi_index_roundtrip(dims in proptest::collection::vec(1usize..6, 1..4), seed in 0usize..10_000) {
            let total: usize = dims.iter().product();
            let lin = seed % total;
            prop_assert_eq!(linear_index(&multi_index(lin, &dims), &dims), lin);
        }
    }
}
