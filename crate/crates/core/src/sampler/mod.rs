//! Test functions on `ℝⁿ`, seeded Gaussian sampling, empirical
//! rearrangements and the one-dimensional Gaussian symmetrization.

mod empirical;
mod families;
mod symmetrize;

pub use empirical::{
    batch_mean_se, gaussian_map, mean_se, sample_rearrangement, EmpiricalRearrangement,
    DEFAULT_PARTITIONS, MIN_SAMPLES,
};
pub use families::{
    analytic_quantile, eval_checked,
    family_catalog, BoxedFunction, Constant, ExpFamily, FamilyBuilder, FamilyRegistry, LinearFamily,
    Mixture, NormFamily, OneDim, RadialBump, RampFamily, TensorProduct, TestFunction, Truncated,
    CATALOG_DIMS,
};
pub use symmetrize::{gaussian_symmetrization, symmetrize_empirical, Symmetrized};
