//! Empirical side of the Tauberian constants: grid lower bounds over finite
//! candidate families, the slab protrusion optimizer, level sweeps and
//! exponent fits.

pub mod family;
pub mod fit;
pub mod sampler;
pub mod slab;
pub mod sweep;

pub use family::{FamilyKind, OperatorFamily};
pub use fit::{dyadic_ladder, fit_exponent, fit_loglog, ExponentFit};
pub use sampler::{iterated_lower_bound, sample_superlevel, CandidateSpec, GridSpec, IteratedGrid, SampledSet};
pub use slab::{slab_halo_height, slab_heights, SlabHeight, SlabShape};
pub use sweep::{
    alpha_sweep, sampled_superlevel_ratio, slab_column_height, theorem4_probe, theorem4_probe_exact_1d, BoundSource,
    LevelOneProbe, SweepRecord, SweepTarget,
};
