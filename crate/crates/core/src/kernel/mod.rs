//! Two-variable functions on product grids: slices, functional images,
//! the differentiation identity and weighted separable approximation.

mod function;
mod ops;
mod separable;

pub use function::{KernelFn, TwoVariableFunction};
pub use ops::{
    apply_functional, check_diff_identity, resolve_functional, slice, ColumnFunctional,
    DiffIdentityReport, DiffLevel, DiffPath, FunctionalImage,
};
pub use separable::{
    classify_decay, density_decay_report, separable_approx, weighted_distance, DecayClass,
    DecayReport, DecayRow, DecaySummary, DecayThresholds, SeparableApproximation, NORM_LABEL,
};
