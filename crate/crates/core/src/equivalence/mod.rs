//! Norm-equivalence constants, dominating-measure bounds, cutoff tails and
//! estimates for entire functions.

mod analytic;
mod certificate;
mod cutoff;
mod pietsch;
mod smoothing;
mod tally;

pub use analytic::{
    cauchy_derivative_bound, mean_value_check, verify_analytic_lp_equivalence, AnalyticEntry,
    AnalyticEquivalenceReport, BoundReport, MeanValueOptions, MeanValueReport,
};
pub use certificate::{
    derive_equivalence_constants, verify_norm_equivalence, Comparison, EquivalenceCertificate,
    EquivalenceEntry, EquivalenceOptions, EquivalenceReport, JKind,
};
pub use cutoff::{
    cutoff_derivative_sup, cutoff_tail_norms, CutoffEntry, CutoffOptions, CutoffReport,
};
pub use pietsch::{verify_pietsch_bound, NuclearityEntry, NuclearityReport};
pub use smoothing::{
    smooth_weight, DerivativeConstant, MollifierDescriptor, SmoothedWeight, SmoothingChain,
    SmoothingOptions,
};
pub use tally::InequalityTally;
