//! Grids, quadrature, multi-indices, sampled functions with exact or
//! finite-difference derivatives, mollifiers and test corpora.

pub mod binio;
pub mod corpus;
pub mod functional;
pub mod grid;
pub mod jet;
pub mod mollifier;
pub mod multiindex;
pub mod sampled;

pub use corpus::{make_corpus, Corpus, CorpusKind, EntireFunction, EntireTerm, HermiteFunction};
pub use functional::{DiscreteFunctional, FunctionalKind};
pub use grid::{integrate, quadrature_values, Axis, Grid, GridDescriptor, QuadratureValue};
pub use jet::Jet;
pub use mollifier::{Mollifier, SmoothStep, TailCutoff};
pub use multiindex::{enumerate_multiindices, multiindex_count, MultiIndex};
pub use sampled::{
    cauchy_riemann_residual, fd_partial, fornberg_weights, DerivativePath, FnSmooth, JetSmooth,
    LeibnizProduct, SampledFunction, Smooth, SmoothRef,
};
