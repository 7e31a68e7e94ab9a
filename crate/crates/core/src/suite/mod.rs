//! One verifier per inequality, each producing an [`InequalityReport`],
//! and a registry that runs them by id.

mod concentration;
mod entropy;
mod poincare;
mod registry;
mod report;
mod sobolev;
mod stats;
mod symmetrization;

pub use concentration::{check_concentration, EXPONENT_SCALE, POINTWISE_T_MIN};
pub use entropy::{
    calibrate_entropy_constant, check_entropy_display, check_entropy_lower_bound,
    check_entropy_lower_bound_quantile, check_truncation_friendly, entropy, entropy_of_quantile,
    DiscreteSpace,
};
pub use poincare::{
    check_feissner, check_ls_norms, check_poincare_dual, check_poincare_l1, dual_potential,
    EMPIRICAL_RANK_FLOOR,
};
pub use registry::{catalog_entropy_constant, run_check, CheckContext, CheckInfo, CheckRegistry};
pub use report::{
    curve_tolerance, curve_z, tolerance_from_se, Comparison, InequalityReport, ReportBuilder, Verdict,
    TOLERANCE_FLOOR,
};
pub use sobolev::{
    check_gross, check_one_dim_ls, gross_exponential_oracle, LineBump, BUMP_SCALES, DECAY_RATIO,
    ONE_DIM_WINDOW,
};
pub use stats::{log_ranks, SortedSample};
pub use symmetrization::{
    check_ledoux, check_oscillation, check_oscillation_exact, check_polya_szego, check_talenti,
    default_window, ledoux_sum, oscillation_weight, MIN_TAIL_RANK, MIN_WINDOW, TALENTI_RANGE,
};
