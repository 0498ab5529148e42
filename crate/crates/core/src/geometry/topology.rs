use super::patch::Patch;
use crate::error::{Error, Result};
use crate::spline::{linear_index, multi_index, FaceBc, SplineSpace};

/// Face of the parametric box: `x_direction = side` (0 or 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub direction: usize,
    pub side: usize,
}

/// Conforming C^0 glue between two patch faces.
///
/// `orientation[t] = (s, flip)` sends the `t`-th tangential direction of face a
/// (tangential directions in increasing order) to the `s`-th tangential direction
/// of face b, reversed when `flip` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub patch_a: usize,
    pub face_a: Face,
    pub patch_b: usize,
    pub face_b: Face,
    pub orientation: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipatchTopology {
    patches: Vec<Patch>,
    interfaces: Vec<Interface>,
}

/// Local-to-global dof maps of a multipatch discretization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub ndofs: usize,
    /// `local_to_global[r][i]` is the global index of retained local dof `i` of patch `r`.
    pub local_to_global: Vec<Vec<usize>>,
}

impl DofMap {
    /// Number of patches sharing each global dof.
    pub fn multiplicity(&self) -> Vec<usize> {
        let mut m = vec![0; self.ndofs];
        for map in &self.local_to_global {
            for &g in map {
                m[g] += 1;
            }
        }
        m
    }

    /// Global dofs owned by exactly one patch (per patch), and the shared ones.
    pub fn interface_split(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let m = self.multiplicity();
        let interior = self
            .local_to_global
            .iter()
            .map(|map| map.iter().copied().filter(|&g| m[g] == 1).collect())
            .collect();
        let interface = (0..self.ndofs).filter(|&g| m[g] > 1).collect();
        (interior, interface)
    }

    /// `sum_r R_r^T x_r`.
    pub fn assemble_vectors(&self, locals: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs];
        for (map, x) in self.local_to_global.iter().zip(locals) {
            for (&g, v) in map.iter().zip(x) {
                out[g] += v;
            }
        }
        out
    }
}

fn tangential(d: usize, normal: usize) -> Vec<usize> {
    (0..d).filter(|&l| l != normal).collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl MultipatchTopology {
    pub fn new(patches: Vec<Patch>, interfaces: Vec<Interface>) -> Result<Self> {
        let topo = Self { patches, interfaces };
        for itf in &topo.interfaces {
            topo.check_interface(itf)?;
        }
        Ok(topo)
    }

    pub fn single(patch: Patch) -> Self {
        Self { patches: vec![patch], interfaces: Vec::new() }
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn dim(&self) -> usize {
        self.patches.first().map_or(0, |p| p.dim())
    }

    /// Maps a parametric point on face a to the matching point on face b.
    fn map_face_point(&self, itf: &Interface, xa: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let ta = tangential(d, itf.face_a.direction);
        let tb = tangential(d, itf.face_b.direction);
        let mut xb = vec![0.0; d];
        xb[itf.face_b.direction] = itf.face_b.side as f64;
        for (t, &(s, flip)) in itf.orientation.iter().enumerate() {
            let v = xa[ta[t]];
            xb[tb[s]] = if flip { 1.0 - v } else { v };
        }
        xb
    }

    fn check_interface(&self, itf: &Interface) -> Result<()> {
        let d = self.dim();
        let np = self.patches.len();
        if itf.patch_a >= np || itf.patch_b >= np {
            return Err(Error::InconsistentMaps(format!(
                "interface references patch {} or {} of {np}",
                itf.patch_a, itf.patch_b
            )));
        }
        let mut perm: Vec<usize> = itf.orientation.iter().map(|o| o.0).collect();
        perm.sort_unstable();
        if itf.orientation.len() + 1 != d || perm.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(Error::InconsistentMaps("interface orientation is not a permutation".into()));
        }
        // geometric conformity on a sample grid of the face
        let samples = 5usize;
        let ta = tangential(d, itf.face_a.direction);
        let scale = self.patches[itf.patch_a]
            .control_points()
            .iter()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.abs()));
        for s in 0..samples.pow(ta.len() as u32) {
            let mi = multi_index(s, &vec![samples; ta.len()]);
            let mut xa = vec![0.0; d];
            xa[itf.face_a.direction] = itf.face_a.side as f64;
            for (t, &l) in ta.iter().enumerate() {
                xa[l] = mi[t] as f64 / (samples - 1) as f64;
            }
            let xb = self.map_face_point(itf, &xa);
            let pa = self.patches[itf.patch_a].eval(&xa)?;
            let pb = self.patches[itf.patch_b].eval(&xb)?;
            let gap = pa.iter().zip(&pb).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if gap > 1e-10 * scale {
                return Err(Error::NonconformingInterface(format!(
                    "patches {} and {} differ by {gap:e} at {xa:?}",
                    itf.patch_a, itf.patch_b
                )));
            }
        }
        Ok(())
    }

    /// Faces not covered by any interface, as `(patch, face)`.
    pub fn boundary_faces(&self) -> Vec<(usize, Face)> {
        let d = self.dim();
        let mut out = Vec::new();
        for r in 0..self.patches.len() {
            for direction in 0..d {
                for side in 0..2 {
                    let f = Face { direction, side };
                    let glued = self
                        .interfaces
                        .iter()
                        .any(|i| (i.patch_a == r && i.face_a == f) || (i.patch_b == r && i.face_b == f));
                    if !glued {
                        out.push((r, f));
                    }
                }
            }
        }
        out
    }

    /// Uniform discretization spaces on every patch, with Dirichlet on unglued faces if requested.
    pub fn uniform_spaces(&self, elements: usize, p: usize, k: usize, dirichlet: bool) -> Result<Vec<SplineSpace>> {
        let d = self.dim();
        let mut spaces = vec![SplineSpace::uniform(d, elements, p, k)?; self.patches.len()];
        if dirichlet {
            for (r, f) in self.boundary_faces() {
                spaces[r].set_face(f.direction, f.side, FaceBc::Dirichlet);
            }
        }
        Ok(spaces)
    }

    /// Merge interface dofs and number global dofs patch by patch.
    pub fn numbering(&self, spaces: &[SplineSpace]) -> Result<DofMap> {
        if spaces.len() != self.patches.len() {
            return Err(Error::LengthMismatch { expected: self.patches.len(), got: spaces.len() });
        }
        let d = self.dim();
        let full: Vec<Vec<usize>> = spaces.iter().map(|s| s.full_dims()).collect();
        let mut base = vec![0usize];
        for f in &full {
            base.push(base.last().unwrap() + f.iter().product::<usize>());
        }
        let mut parent: Vec<usize> = (0..*base.last().unwrap()).collect();

        for itf in &self.interfaces {
            let (a, b) = (itf.patch_a, itf.patch_b);
            let (sa, sb) = (&spaces[a], &spaces[b]);
            for f in [itf.face_a, itf.face_b] {
                let (r, s) = if f == itf.face_a { (a, sa) } else { (b, sb) };
                if s.bc()[f.direction][f.side] == FaceBc::Dirichlet {
                    return Err(Error::InconsistentMaps(format!("glued face {f:?} of patch {r} is constrained")));
                }
            }
            let ta = tangential(d, itf.face_a.direction);
            let tb = tangential(d, itf.face_b.direction);
            for (t, &(s, flip)) in itf.orientation.iter().enumerate() {
                let ka = sa.knot_vector(ta[t]);
                let kb = sb.knot_vector(tb[s]);
                let mut kbv: Vec<f64> = kb.knots().to_vec();
                if flip {
                    kbv = kbv.iter().rev().map(|x| 1.0 - x).collect();
                }
                let same = ka.degree() == kb.degree()
                    && ka.knots().len() == kbv.len()
                    && ka.knots().iter().zip(&kbv).all(|(x, y)| (x - y).abs() < 1e-12);
                if !same {
                    return Err(Error::NonconformingInterface(format!(
                        "knot vectors of patches {a} and {b} differ across the interface"
                    )));
                }
            }
            let fa = &full[a];
            let fb = &full[b];
            let tdims: Vec<usize> = ta.iter().map(|&l| fa[l]).collect();
            let count: usize = tdims.iter().product();
            for c in 0..count {
                let ti = multi_index(c, &tdims);
                let mut ia = vec![0; d];
                ia[itf.face_a.direction] = if itf.face_a.side == 0 { 0 } else { fa[itf.face_a.direction] - 1 };
                let mut ib = vec![0; d];
                ib[itf.face_b.direction] = if itf.face_b.side == 0 { 0 } else { fb[itf.face_b.direction] - 1 };
                for (t, &(s, flip)) in itf.orientation.iter().enumerate() {
                    ia[ta[t]] = ti[t];
                    ib[tb[s]] = if flip { fb[tb[s]] - 1 - ti[t] } else { ti[t] };
                }
                let ga = base[a] + linear_index(&ia, fa);
                let gb = base[b] + linear_index(&ib, fb);
                let (ra, rb) = (find(&mut parent, ga), find(&mut parent, gb));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }

        // a merged class must be retained by all its members or by none
        let total = parent.len();
        let mut retained = vec![None::<bool>; total];
        for (r, s) in spaces.iter().enumerate() {
            let n: usize = full[r].iter().product();
            for i in 0..n {
                let keep = s.reduced_index(&multi_index(i, &full[r])).is_some();
                let root = find(&mut parent, base[r] + i);
                match retained[root] {
                    None => retained[root] = Some(keep),
                    Some(k) if k != keep => {
                        return Err(Error::InconsistentMaps(format!(
                            "interface dof of patch {r} is constrained on one side only"
                        )))
                    }
                    _ => {}
                }
            }
        }

        let mut global = vec![usize::MAX; total];
        let mut ndofs = 0;
        let mut local_to_global = Vec::with_capacity(spaces.len());
        for (r, s) in spaces.iter().enumerate() {
            let mut map = Vec::with_capacity(s.ndofs());
            for li in 0..s.ndofs() {
                let fi = linear_index(&s.full_multi_index(li), &full[r]);
                let root = find(&mut parent, base[r] + fi);
                if global[root] == usize::MAX {
                    global[root] = ndofs;
                    ndofs += 1;
                }
                map.push(global[root]);
            }
            let mut sorted = map.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InconsistentMaps(format!("patch {r} is glued to itself")));
            }
            local_to_global.push(map);
        }
        Ok(DofMap { ndofs, local_to_global })
    }
}
