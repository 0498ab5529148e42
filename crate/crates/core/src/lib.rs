//! Mass lumping and spectral deflation for isogeometric explicit dynamics.

// `!(x > 0.0)` deliberately rejects NaN; triangular and recurrence kernels index several arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod lumping;
pub mod spectral;
pub mod spline;

pub use error::{Error, Result};
