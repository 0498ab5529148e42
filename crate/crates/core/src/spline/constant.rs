use crate::error::{Error, Result};
use std::f64::consts::PI;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Explicit L2-projection constant `C_{p,k,r}` for `C^k` splines of degree `p`
/// and Sobolev order `r`.
pub fn approximation_constant(p: usize, k: usize, r: usize) -> Result<f64> {
    if p == 0 || k >= p {
        return Err(Error::DomainViolation(format!("need 0 <= k <= p-1, got p={p}, k={k}")));
    }
    if r < 1 || r > p + 1 {
        return Err(Error::DomainViolation(format!("need 1 <= r <= p+1, got r={r}, p={p}")));
    }
    let half_r = 0.5f64.powi(r as i32);
    if k == p - 1 {
        return Ok((1.0 / PI).powi(r as i32));
    }
    let base = 1.0 / (((p - k) * (p - k + 1)) as f64).sqrt();
    if k + 2 >= r {
        Ok(half_r * base.powi(r as i32))
    } else {
        let ratio = factorial(p + 1 - r) / factorial(p - 1 + r - 2 * k);
        Ok(half_r * base.powi(k as i32 + 1) * ratio.sqrt())
    }
}
