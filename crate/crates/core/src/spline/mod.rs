//! Univariate and tensor-product B-spline spaces.

mod constant;
mod knots;
mod space;

pub use constant::approximation_constant;
pub use knots::{make_open_uniform, KnotVector};
pub use space::{linear_index, multi_index, FaceBc, SplineSpace};
