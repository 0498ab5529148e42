use super::patch::Patch;
use crate::error::Result;
use crate::spline::{multi_index, SplineSpace};
use std::fmt;
use std::sync::Arc;

/// Implicit region `phi(x) <= 0` in physical coordinates.
pub type Region = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    Inside,
    Outside,
    Cut,
}

/// Element classification and dof activity of a trimmed tensor mesh.
#[derive(Clone)]
pub struct TrimMask {
    region: Region,
    element_dims: Vec<usize>,
    classes: Vec<ElementClass>,
    active: Vec<bool>,
    subdepth: usize,
}

impl fmt::Debug for TrimMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrimMask")
            .field("element_dims", &self.element_dims)
            .field("classes", &self.classes)
            .field("subdepth", &self.subdepth)
            .finish_non_exhaustive()
    }
}

impl TrimMask {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn element_dims(&self) -> &[usize] {
        &self.element_dims
    }

    /// Classes of the elements in lexicographic order.
    pub fn classes(&self) -> &[ElementClass] {
        &self.classes
    }

    /// Activity per retained dof of the space (reduced lexicographic index).
    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn subdepth(&self) -> usize {
        self.subdepth
    }

    pub fn count(&self, class: ElementClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

/// Per-direction nonempty knot spans of a space.
pub(crate) fn element_spans(space: &SplineSpace) -> Vec<Vec<(usize, f64, f64)>> {
    space.knot_vectors().iter().map(|k| k.elements()).collect()
}

/// Classify elements by sampling the region at the corners of a uniform subcell grid.
///
/// Elements whose samples are all `<= 0` are inside, all `>= 0` outside, otherwise cut.
pub fn classify_elements(space: &SplineSpace, patch: &Patch, region: Region, subdepth: usize) -> Result<TrimMask> {
    let d = space.dim();
    let spans = element_spans(space);
    let element_dims: Vec<usize> = spans.iter().map(|s| s.len()).collect();
    let nel: usize = element_dims.iter().product();
    let per = (1usize << subdepth) + 1;
    let nsamples = per.pow(d as u32);
    let mut classes = Vec::with_capacity(nel);
    for e in 0..nel {
        let em = multi_index(e, &element_dims);
        let (mut any_in, mut any_out) = (false, false);
        let (mut all_in, mut all_out) = (true, true);
        for s in 0..nsamples {
            let sm = multi_index(s, &vec![per; d]);
            let xhat: Vec<f64> = (0..d)
                .map(|l| {
                    let (_, a, b) = spans[l][em[l]];
                    a + (b - a) * sm[l] as f64 / (per - 1) as f64
                })
                .collect();
            let phi = region(&patch.eval(&xhat)?);
            all_in &= phi <= 0.0;
            all_out &= phi >= 0.0;
            any_in |= phi < 0.0;
            any_out |= phi > 0.0;
        }
        let class = if all_in {
            ElementClass::Inside
        } else if all_out {
            ElementClass::Outside
        } else {
            debug_assert!(any_in && any_out);
            ElementClass::Cut
        };
        classes.push(class);
    }

    let full = space.full_dims();
    let mut full_active = vec![false; full.iter().product()];
    let degrees = space.degrees();
    let local: Vec<usize> = degrees.iter().map(|p| p + 1).collect();
    let nloc: usize = local.iter().product();
    for (e, class) in classes.iter().enumerate() {
        if *class == ElementClass::Outside {
            continue;
        }
        let em = multi_index(e, &element_dims);
        for a in 0..nloc {
            let am = multi_index(a, &local);
            let fi: Vec<usize> = (0..d).map(|l| spans[l][em[l]].0 - degrees[l] + am[l]).collect();
            full_active[crate::spline::linear_index(&fi, &full)] = true;
        }
    }
    let active = (0..space.ndofs())
        .map(|i| full_active[crate::spline::linear_index(&space.full_multi_index(i), &full)])
        .collect();
    Ok(TrimMask { region, element_dims, classes, active, subdepth })
}

/// Square of the given side centred at `(0.5, 0.5) + shift`, rotated by `angle`.
pub fn rotated_square(side: f64, angle: f64, shift: [f64; 2]) -> Region {
    let c = [0.5 + shift[0], 0.5 + shift[1]];
    let (s, co) = angle.sin_cos();
    Arc::new(move |x: &[f64]| {
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        let u = co * dx + s * dy;
        let v = -s * dx + co * dy;
        u.abs().max(v.abs()) - side / 2.0
    })
}

/// Half space `x_direction < offset`.
pub fn half_space(direction: usize, offset: f64) -> Region {
    Arc::new(move |x: &[f64]| x[direction] - offset)
}
