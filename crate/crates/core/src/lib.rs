//! Weighted spaces of smooth and entire functions: defining families,
//! seminorms, norm-equivalence constants and kernel decompositions on grids.

pub mod equivalence;
pub mod error;
pub mod expr;
pub mod funcspace;
pub mod kernel;
pub mod scalar;
pub mod seminorms;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{FieldValue, Scalar};

/// `f64` instantiations of the generic types.
pub mod f64 {
    pub type Grid = crate::funcspace::Grid<f64>;
    pub type MultiIndex = crate::funcspace::MultiIndex;
    pub type SampledFunction = crate::funcspace::SampledFunction<f64>;
    pub type ComplexSampledFunction =
        crate::funcspace::SampledFunction<f64, num_complex::Complex<f64>>;
    pub type Mollifier = crate::funcspace::Mollifier<f64>;
    pub type DiscreteFunctional = crate::funcspace::DiscreteFunctional<f64>;
    pub type WeightFunction = crate::weights::WeightFunction<f64>;
    pub type DefiningFamily = crate::weights::DefiningFamily<f64>;
    pub type IndexLabel = crate::weights::IndexLabel<f64>;
    pub type SeminormValue = crate::seminorms::SeminormValue<f64>;
    pub type EquivalenceCertificate = crate::equivalence::EquivalenceCertificate<f64>;
    pub type TwoVariableFunction = crate::kernel::TwoVariableFunction<f64>;
    pub type KernelFn = crate::kernel::KernelFn<f64>;
    pub type SeparableApproximation = crate::kernel::SeparableApproximation<f64>;
}

/// `f32` instantiations of the generic types.
pub mod f32 {
    pub type Grid = crate::funcspace::Grid<f32>;
    pub type SampledFunction = crate::funcspace::SampledFunction<f32>;
    pub type WeightFunction = crate::weights::WeightFunction<f32>;
    pub type DefiningFamily = crate::weights::DefiningFamily<f32>;
    pub type TwoVariableFunction = crate::kernel::TwoVariableFunction<f32>;
}
