use crate::error::{Error, Result};

/// Open knot vector of a univariate B-spline space.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    /// Validates openness, monotonicity and interior multiplicities `1 <= m <= p`.
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(Error::InvalidDegree(format!(
                "{} knots cannot carry an open degree-{p} space",
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::DomainViolation("knots must be nondecreasing".into()));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if !(last > first) {
            return Err(Error::DomainViolation("knot vector spans an empty interval".into()));
        }
        if knots[..=p].iter().any(|&k| k != first) || knots[knots.len() - p - 1..].iter().any(|&k| k != last)
        {
            return Err(Error::DomainViolation(format!(
                "knot vector is not open: first and last {} knots must coincide",
                p + 1
            )));
        }
        let interior = &knots[p + 1..knots.len() - p - 1];
        let mut i = 0;
        while i < interior.len() {
            let mut j = i;
            while j < interior.len() && interior[j] == interior[i] {
                j += 1;
            }
            if interior[i] == first || interior[i] == last || j - i > p {
                return Err(Error::DomainViolation(format!(
                    "interior knot {} has multiplicity above {p}",
                    interior[i]
                )));
            }
            i = j;
        }
        Ok(Self { knots, degree })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `len - p - 1`.
    pub fn dim(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Distinct knot values in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &k in &self.knots {
            if out.last() != Some(&k) {
                out.push(k);
            }
        }
        out
    }

    /// Nonempty knot spans as `(span index, left, right)`.
    pub fn elements(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        (p..self.dim())
            .filter(|&i| self.knots[i + 1] > self.knots[i])
            .map(|i| (i, self.knots[i], self.knots[i + 1]))
            .collect()
    }

    /// Span index `s` with `knots[s] <= x < knots[s+1]`; the right end maps to the last nonempty span.
    pub fn find_span(&self, x: f64) -> Result<usize> {
        let (a, b) = (self.start(), self.end());
        if !(x >= a && x <= b) {
            return Err(Error::OutOfRange { value: x, lo: a, hi: b });
        }
        let n = self.dim();
        if x >= self.knots[n] {
            return Ok(n - 1);
        }
        // binary search in [p, n)
        let (mut lo, mut hi) = (self.degree, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    /// Nonzero basis functions (or their first derivatives) at `x`.
    ///
    /// Returns the index of the first active function and the `p + 1` values.
    pub fn eval(&self, x: f64, deriv_order: usize) -> Result<(usize, Vec<f64>)> {
        let span = self.find_span(x)?;
        let ders = self.ders_at_span(span, x, deriv_order.min(self.degree))?;
        let row = if deriv_order < ders.len() {
            ders[deriv_order].clone()
        } else {
            vec![0.0; self.degree + 1]
        };
        Ok((span - self.degree, row))
    }

    /// Cox-de Boor triangle with derivatives up to `nd` (The NURBS Book, A2.3).
    pub(crate) fn ders_at_span(&self, span: usize, x: f64, nd: usize) -> Result<Vec<Vec<f64>>> {
        let p = self.degree;
        let u = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let mut ders = vec![vec![0.0; p + 1]; nd + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=nd {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize { k - 1 } else { p - r };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut fac = p as f64;
        for k in 1..=nd {
            for v in ders[k].iter_mut() {
                *v *= fac;
            }
            fac *= (p - k) as f64;
        }
        Ok(ders)
    }
}

/// Open knot vector on `[0, 1]` with `elements` uniform elements and interior multiplicity `p - k`.
pub fn make_open_uniform(elements: usize, p: usize, k: usize) -> Result<KnotVector> {
    if p < 1 || k >= p {
        return Err(Error::InvalidDegree(format!(
            "need p >= 1 and 0 <= k <= p-1, got p={p}, k={k}"
        )));
    }
    if elements == 0 {
        return Err(Error::InvalidArgument("at least one element is required".into()));
    }
    let m = p - k;
    let mut knots = vec![0.0; p + 1];
    for e in 1..elements {
        let x = e as f64 / elements as f64;
        knots.extend(std::iter::repeat_n(x, m));
    }
    knots.extend(std::iter::repeat_n(1.0, p + 1));
    KnotVector::new(knots, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_single_element() {
        let kv = make_open_uniform(1, 1, 0).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(kv.dim(), 2);
        let (first, v) = kv.eval(0.25, 0).unwrap();
        assert_eq!(first, 0);
        assert!((v[0] - 0.75).abs() < 1e-15 && (v[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dimension_formula_examples() {
        assert_eq!(make_open_uniform(6, 2, 1).unwrap().dim(), 8);
        assert_eq!(make_open_uniform(4, 3, 2).unwrap().dim(), 7);
        assert_eq!(make_open_uniform(4, 3, 0).unwrap().dim(), 13);
    }

    #[test]
    fn bernstein_quadratic_midpoint() {
        let kv = make_open_uniform(1, 2, 1).unwrap();
        let (_, v) = kv.eval(0.5, 0).unwrap();
        for (a, b) in v.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_degree_rejected() {
        assert!(matches!(make_open_uniform(3, 2, 2), Err(Error::InvalidDegree(_))));
        assert!(matches!(make_open_uniform(3, 0, 0), Err(Error::InvalidDegree(_))));
    }

    #[test]
    fn out_of_range_rejected() {
        let kv = make_open_uniform(3, 2, 1).unwrap();
        assert!(matches!(kv.eval(1.5, 0), Err(Error::OutOfRange { .. })));
        assert!(kv.eval(-1e-3, 0).is_err());
    }

    #[test]
    fn span_ties_go_right_except_at_end() {
        let kv = make_open_uniform(4, 2, 1).unwrap();
        assert_eq!(kv.find_span(0.25).unwrap(), 3);
        assert_eq!(kv.find_span(0.0).unwrap(), 2);
        assert_eq!(kv.find_span(1.0).unwrap(), 5);
    }

    #[test]
    fn rejects_bad_multiplicity_and_closed_vectors() {
        assert!(KnotVector::new(vec![0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0], 1).is_err());
        assert!(KnotVector::new(vec![0.0, 0.1, 1.0, 1.0], 1).is_err());
    }
}
