use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{quadrature_values, Grid, QuadratureValue};
use super::jet::{layout, Jet};
use super::multiindex::{enumerate_multiindices, MultiIndex};
use crate::error::{Error, Result};
use crate::scalar::{FieldValue, Scalar};

/// A function with exact partial derivatives at arbitrary points.
pub trait Smooth<T: Scalar, V: FieldValue<T>>: Send + Sync {
    fn dim(&self) -> usize;

    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> V;

    fn value(&self, x: &[T]) -> V {
        self.derivative(&MultiIndex::zero(self.dim()), x)
    }

    /// All `d^mu f(x)` with `|mu| <= order`, in `enumerate_multiindices` order.
    fn derivatives_upto(&self, order: usize, x: &[T]) -> Vec<V> {
        enumerate_multiindices(self.dim(), order)
            .iter()
            .map(|mu| self.derivative(mu, x))
            .collect()
    }
}

pub type SmoothRef<T, V> = Arc<dyn Smooth<T, V>>;

/// Wraps a closure `(mu, x) -> d^mu f(x)`.
pub struct FnSmooth<F> {
    dim: usize,
    f: F,
}

impl<F> FnSmooth<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, V, F> Smooth<T, V> for FnSmooth<F>
where
    T: Scalar,
    V: FieldValue<T>,
    F: Fn(&MultiIndex, &[T]) -> V + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> V {
        (self.f)(mu, x)
    }
}

/// Real function defined by jet arithmetic on the coordinate jets.
pub struct JetSmooth<F> {
    dim: usize,
    f: F,
}

impl<F> JetSmooth<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F> Smooth<T, T> for JetSmooth<F>
where
    T: Scalar,
    F: Fn(&[Jet<T>]) -> Jet<T> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> T {
        let lay = layout(self.dim, mu.order());
        (self.f)(&Jet::variables(&lay, x)).derivative(mu)
    }

    fn derivatives_upto(&self, order: usize, x: &[T]) -> Vec<T> {
        let lay = layout(self.dim, order);
        (self.f)(&Jet::variables(&lay, x)).derivatives()
    }
}

/// `d^offset` of an inner function; composing shifts adds offsets exactly.
struct Shifted<T: Scalar, V: FieldValue<T>> {
    inner: SmoothRef<T, V>,
    offset: MultiIndex,
}

impl<T: Scalar, V: FieldValue<T>> Smooth<T, V> for Shifted<T, V> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> V {
        self.inner.derivative(&(&self.offset + mu), x)
    }
}

/// `sum_i c_i f_i` with real coefficients.
struct Combination<T: Scalar, V: FieldValue<T>> {
    terms: Vec<(T, SmoothRef<T, V>)>,
}

impl<T: Scalar, V: FieldValue<T>> Smooth<T, V> for Combination<T, V> {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> V {
        self.terms
            .iter()
            .fold(V::zero(), |acc, (c, f)| acc + f.derivative(mu, x) * *c)
    }
    fn derivatives_upto(&self, order: usize, x: &[T]) -> Vec<V> {
        let mut out: Option<Vec<V>> = None;
        for (c, f) in &self.terms {
            let d = f.derivatives_upto(order, x);
            out = Some(match out {
                None => d.into_iter().map(|v| v * *c).collect(),
                Some(acc) => acc.into_iter().zip(d).map(|(a, v)| a + v * *c).collect(),
            });
        }
        out.unwrap_or_default()
    }
}

/// Product `phi * f` of a real jet-defined factor and a smooth function,
/// differentiated by the Leibniz rule.
pub struct LeibnizProduct<T: Scalar, V: FieldValue<T>> {
    pub factor: SmoothRef<T, T>,
    pub inner: SmoothRef<T, V>,
}

impl<T: Scalar, V: FieldValue<T>> Smooth<T, V> for LeibnizProduct<T, V> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> V {
        let mut acc = V::zero();
        for nu in mu.sub_indices() {
            let phi = self.factor.derivative(&nu, x);
            if phi.is_zero() {
                continue;
            }
            let rest = mu.checked_sub(&nu).expect("nu <= mu");
            acc = acc + self.inner.derivative(&rest, x) * (phi * T::lit(mu.binomial(&nu)));
        }
        acc
    }
}

/// How derivative values were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativePath {
    /// Exact evaluator.
    Exact,
    /// Second-order finite differences, nominal error `O(h^2)`.
    FiniteDifference,
}

impl DerivativePath {
    pub fn combine(self, other: Self) -> Self {
        if self == Self::Exact && other == Self::Exact {
            Self::Exact
        } else {
            Self::FiniteDifference
        }
    }
}

impl fmt::Display for DerivativePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::FiniteDifference => "finite-difference",
        })
    }
}

/// Values of a real or complex function on a tensor grid, with an optional
/// exact derivative evaluator.
#[derive(Clone)]
pub struct SampledFunction<T: Scalar, V: FieldValue<T> = T> {
    grid: Grid<T>,
    values: Vec<V>,
    exact: Option<SmoothRef<T, V>>,
    analytic: bool,
    path: DerivativePath,
    label: String,
}

impl<T: Scalar, V: FieldValue<T>> fmt::Debug for SampledFunction<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("label", &self.label)
            .field("grid", &self.grid.descriptor())
            .field("exact", &self.exact.is_some())
            .field("analytic", &self.analytic)
            .field("path", &self.path)
            .finish()
    }
}

impl<T: Scalar, V: FieldValue<T>> SampledFunction<T, V> {
    pub fn from_values(grid: Grid<T>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(format!(
                "function value at {:?}",
                grid.point(bad)
            )));
        }
        Ok(Self {
            grid,
            values,
            exact: None,
            analytic: false,
            path: DerivativePath::Exact,
            label: String::new(),
        })
    }

    /// Samples an exact evaluator on the grid.
    pub fn from_smooth(grid: Grid<T>, smooth: SmoothRef<T, V>) -> Result<Self> {
        if smooth.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: smooth.dim(),
            });
        }
        let values: Vec<V> = (0..grid.len())
            .into_par_iter()
            .map(|i| smooth.value(&grid.point(i)))
            .collect();
        let mut f = Self::from_values(grid, values)?;
        f.exact = Some(smooth);
        Ok(f)
    }

    /// Samples a plain pointwise closure; no derivative evaluator is attached.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(&[T]) -> V + Sync) -> Result<Self> {
        let values: Vec<V> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Declares the function entire on `C^k` (grid axes interleave real and
    /// imaginary parts).
    pub fn with_analytic(mut self, analytic: bool) -> Self {
        self.analytic = analytic;
        self
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn exact(&self) -> Option<&SmoothRef<T, V>> {
        self.exact.as_ref()
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn path(&self) -> DerivativePath {
        self.path
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Exact value at an arbitrary point.
    pub fn evaluate(&self, x: &[T]) -> Result<V> {
        let f = self.exact.as_ref().ok_or(Error::MissingEvaluator)?;
        Ok(f.value(x))
    }

    /// Same function re-sampled on another grid (requires an exact evaluator).
    pub fn resampled(&self, grid: Grid<T>) -> Result<Self> {
        let f = self.exact.clone().ok_or(Error::MissingEvaluator)?;
        Ok(Self::from_smooth(grid, f)?
            .with_analytic(self.analytic)
            .with_label(self.label.clone()))
    }

    /// `c * f`.
    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.values = self.values.iter().map(|&v| v * c).collect();
        out.exact = self.exact.clone().map(|e| {
            Arc::new(Combination {
                terms: vec![(c, e)],
            }) as SmoothRef<T, V>
        });
        out
    }

    /// `f + g` on a common grid.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid(
                "summands live on different grids".into(),
            ));
        }
        let mut out = self.clone();
        out.values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        out.exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(Arc::new(Combination {
                terms: vec![(T::one(), a.clone()), (T::one(), b.clone())],
            }) as SmoothRef<T, V>),
            _ => None,
        };
        out.analytic = self.analytic && other.analytic;
        out.path = self.path.combine(other.path);
        Ok(out)
    }

    /// `d^mu f`: exact when an evaluator is present, otherwise second-order
    /// finite differences with one-sided stencils at the box faces.
    pub fn partial_derivative(&self, mu: &MultiIndex) -> Result<Self> {
        if mu.dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                got: mu.dim(),
            });
        }
        if mu.is_zero() {
            return Ok(self.clone());
        }
        match &self.exact {
            Some(inner) => {
                let shifted: SmoothRef<T, V> = Arc::new(Shifted {
                    inner: inner.clone(),
                    offset: mu.clone(),
                });
                let mut out = Self::from_smooth(self.grid.clone(), shifted)?;
                out.analytic = self.analytic;
                out.label = self.label.clone();
                Ok(out)
            }
            None => {
                let values = fd_partial(&self.grid, &self.values, mu)?;
                let mut out = Self::from_values(self.grid.clone(), values)?;
                out.path = DerivativePath::FiniteDifference;
                out.analytic = self.analytic;
                out.label = self.label.clone();
                Ok(out)
            }
        }
    }

    /// Derivative values for every `|mu| <= m` (outer index follows
    /// `enumerate_multiindices`), plus the path that produced them.
    pub fn derivative_table(&self, m: usize) -> Result<(Vec<Vec<V>>, DerivativePath)> {
        let k = self.grid.dim();
        let indices = enumerate_multiindices(k, m);
        match &self.exact {
            Some(f) if m > 0 => {
                let per_point: Vec<Vec<V>> = (0..self.grid.len())
                    .into_par_iter()
                    .map(|i| f.derivatives_upto(m, &self.grid.point(i)))
                    .collect();
                let mut table = vec![Vec::with_capacity(self.grid.len()); indices.len()];
                for row in per_point {
                    for (slot, v) in table.iter_mut().zip(row) {
                        slot.push(v);
                    }
                }
                check_table(&table)?;
                Ok((table, self.path))
            }
            _ => {
                let mut table = Vec::with_capacity(indices.len());
                for mu in &indices {
                    if mu.is_zero() {
                        table.push(self.values.clone());
                    } else {
                        table.push(fd_partial(&self.grid, &self.values, mu)?);
                    }
                }
                check_table(&table)?;
                let path = if m == 0 {
                    self.path
                } else {
                    DerivativePath::FiniteDifference
                };
                Ok((table, path))
            }
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureValue<T, V>> {
        quadrature_values(&self.grid, &self.values)
    }

    pub fn max_modulus(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, v| m.max(v.modulus()))
    }
}

fn check_table<T: Scalar, V: FieldValue<T>>(table: &[Vec<V>]) -> Result<()> {
    for (i, col) in table.iter().enumerate() {
        if col.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(format!("derivative table entry {i}")));
        }
    }
    Ok(())
}

/// Finite-difference weights for derivatives `0..=order` at `z` on `nodes`
/// (Fornberg's recursion). `out[d][j]` is the weight of node `j` for order `d`.
pub fn fornberg_weights<T: Scalar>(z: T, nodes: &[T], order: usize) -> Vec<Vec<T>> {
    let n = nodes.len();
    let mut c = vec![vec![T::zero(); n]; order + 1];
    let mut c1 = T::one();
    let mut c4 = nodes[0] - z;
    c[0][0] = T::one();
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (T::from_count(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - T::from_count(k) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Per-node stencils `(start, weights)` for a derivative of `order` along an
/// axis of `n` points with spacing `h`: centered where possible, one-sided
/// near the ends, second-order accurate throughout.
fn axis_stencils<T: Scalar>(n: usize, h: T, order: usize) -> Vec<(usize, Vec<T>)> {
    let centered = 2 * order.div_ceil(2) + 1;
    let half = centered / 2;
    let one_sided = order + 2;
    let scale = h.powi(order as i32);
    (0..n)
        .map(|i| {
            let (start, size) = if i >= half && i + half < n {
                (i - half, centered)
            } else if i < half {
                (0, one_sided)
            } else {
                (n - one_sided, one_sided)
            };
            let nodes: Vec<T> = (0..size).map(|j| T::from_count(start + j)).collect();
            let w = fornberg_weights(T::from_count(i), &nodes, order);
            (start, w[order].iter().map(|&v| v / scale).collect())
        })
        .collect()
}

/// Finite-difference partial derivative of grid values.
pub fn fd_partial<T: Scalar, V: FieldValue<T>>(
    grid: &Grid<T>,
    values: &[V],
    mu: &MultiIndex,
) -> Result<Vec<V>> {
    let total = mu.order();
    for (axis, &d) in mu.components().iter().enumerate() {
        let points = grid.axis(axis).points;
        if d > 0 && points < 2 * total + 1 {
            return Err(Error::GridTooCoarse {
                axis,
                points,
                order: total,
                needed: 2 * total + 1,
            });
        }
    }
    let mut current = values.to_vec();
    for (axis, &d) in mu.components().iter().enumerate() {
        if d == 0 {
            continue;
        }
        let n = grid.axis(axis).points;
        let stride = grid.stride(axis);
        let stencils = axis_stencils(n, grid.axis(axis).spacing(), d);
        let mut next = vec![V::zero(); current.len()];
        for base in 0..current.len() {
            if !(base / stride).is_multiple_of(n) {
                continue;
            }
            for (i, (start, w)) in stencils.iter().enumerate() {
                let acc = w.iter().enumerate().fold(V::zero(), |acc, (j, &wj)| {
                    acc + current[base + (start + j) * stride] * wj
                });
                next[base + i * stride] = acc;
            }
        }
        current = next;
    }
    Ok(current)
}

/// Max modulus of `d_x f + i d_y f` over every complex coordinate, relative
/// to the largest first derivative: zero for entire functions up to
/// discretization error.
pub fn cauchy_riemann_residual<T: Scalar>(f: &SampledFunction<T, Complex<T>>) -> Result<T> {
    let dim = f.grid().dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::InvalidGrid(
            "complex domains need an even number of axes".into(),
        ));
    }
    let mut worst = T::zero();
    let mut scale = T::zero();
    for j in 0..dim / 2 {
        let dx = fd_partial(f.grid(), f.values(), &MultiIndex::axis(dim, 2 * j, 1))?;
        let dy = fd_partial(f.grid(), f.values(), &MultiIndex::axis(dim, 2 * j + 1, 1))?;
        for (a, b) in dx.iter().zip(&dy) {
            let r = *a + b.times_i_pow(1);
            worst = worst.max(r.modulus());
            scale = scale.max(a.modulus()).max(b.modulus());
        }
    }
    Ok(if scale > T::zero() {
        worst / scale
    } else {
        worst
    })
}
