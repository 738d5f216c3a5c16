use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::sampled::SampledFunction;
use crate::error::{Error, Result};
use crate::scalar::{FieldValue, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    Delta,
    DeltaCombination,
    Quadrature,
}

/// Finite linear functional `g -> sum_j c_j g(y_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFunctional<T> {
    kind: FunctionalKind,
    points: Vec<Vec<T>>,
    coefficients: Vec<T>,
}

impl<T: Scalar> DiscreteFunctional<T> {
    pub fn delta(y: Vec<T>) -> Self {
        Self {
            kind: FunctionalKind::Delta,
            points: vec![y],
            coefficients: vec![T::one()],
        }
    }

    pub fn combination(terms: Vec<(Vec<T>, T)>) -> Result<Self> {
        let dim = terms.first().map(|t| t.0.len()).ok_or_else(|| {
            Error::InvalidParams("a delta combination needs at least one term".into())
        })?;
        if let Some(t) = terms.iter().find(|t| t.0.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: t.0.len(),
            });
        }
        let (points, coefficients) = terms.into_iter().unzip();
        Ok(Self {
            kind: FunctionalKind::DeltaCombination,
            points,
            coefficients,
        })
    }

    /// `g -> quadrature of g` over the grid box.
    pub fn quadrature(grid: &Grid<T>) -> Self {
        Self {
            kind: FunctionalKind::Quadrature,
            points: grid.points(),
            coefficients: grid.quadrature_weights(),
        }
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let points = self.points.iter().chain(&other.points).cloned().collect();
        let coefficients = self
            .coefficients
            .iter()
            .map(|&c| a * c)
            .chain(other.coefficients.iter().map(|&c| b * c))
            .collect();
        Ok(Self {
            kind: FunctionalKind::DeltaCombination,
            points,
            coefficients,
        })
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[T], T)> {
        self.points
            .iter()
            .map(Vec::as_slice)
            .zip(self.coefficients.iter().copied())
    }

    /// `sum_j c_j g(y_j)`, accumulated in term order.
    pub fn apply<V: FieldValue<T>>(&self, g: impl Fn(&[T]) -> V) -> V {
        self.terms().fold(V::zero(), |acc, (y, c)| acc + g(y) * c)
    }

    /// Applies the functional to a sampled function: exact evaluator if
    /// present, otherwise the grid value at each functional point.
    pub fn apply_sampled<V: FieldValue<T>>(&self, f: &SampledFunction<T, V>) -> Result<V> {
        if self.dim() != f.grid().dim() {
            return Err(Error::DimensionMismatch {
                expected: f.grid().dim(),
                got: self.dim(),
            });
        }
        let mut acc = V::zero();
        for (y, c) in self.terms() {
            let v = match f.exact() {
                Some(e) => e.value(y),
                None => {
                    let i = f.grid().locate(y).ok_or_else(|| {
                        Error::OffGrid(y.iter().map(|v| v.to_f64_lossy()).collect())
                    })?;
                    f.values()[i]
                }
            };
            acc = acc + v * c;
        }
        Ok(acc)
    }
}
