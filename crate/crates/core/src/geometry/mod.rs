//! Patch maps, the geometry catalog, multipatch numbering and trimming.

pub mod catalog;
mod io;
mod patch;
mod topology;
mod trim;

pub use io::{read_topology, write_topology};
pub use patch::{jacobian, pullback_coeffs, Field, Patch};
pub use topology::{DofMap, Face, Interface, MultipatchTopology};
pub use trim::{classify_elements, half_space, rotated_square, ElementClass, Region, TrimMask};
