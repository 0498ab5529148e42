//! Row-sum, block, hierarchical, multipatch and trimmed mass lumping.

mod hier;
mod ops;
mod random;

pub use hier::{HierBandedMatrix, HierStructure};
pub use ops::{block_lump, block_lumped_family, hierarchical_lump, lump_rowsum, multipatch_lump, pad_lump_trim, Lumping};
pub use random::random_spn;
