//! Seeded samplers for every matrix model.

mod dist;
mod dregular;
mod sample;
mod spec;

pub use dist::{DistKind, EntryDistribution};
pub use sample::{
    outlier_count, sample, sample_correlated_wigner_family, sample_correlated_wigner_pair, sample_dregular_adjacency,
    sample_haar_orthogonal, sample_kernel,
};
pub use spec::EnsembleSpec;
