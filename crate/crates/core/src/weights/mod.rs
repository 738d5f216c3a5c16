//! Defining families of weight functions, their witnesses, tensor products
//! and grid checks of the family conditions.

pub mod checks;
pub mod family;
pub mod sampling;
pub mod spec;
pub mod tensor;
pub mod weight;

pub use checks::{
    check_condition_a, check_condition_c, check_condition_i, check_condition_ii, check_family,
    CheckReport, DecayOptions,
};
pub use family::{make_family, CondIIWitness, CondIWitness, DefiningFamily, Member};
pub use sampling::ball_samples;
pub use spec::FamilySpec;
pub use tensor::{tensor_family, TensorFamily};
pub use weight::{IndexLabel, Shape, WeightFunction, WeightKind};
