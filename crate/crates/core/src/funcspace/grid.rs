use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{FieldValue, Scalar};

/// One axis of a uniform tensor grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Scalar> Axis<T> {
    pub fn spacing(&self) -> T {
        (self.hi - self.lo) / T::from_count(self.points - 1)
    }

    /// Coordinate of node `i`; endpoints are reproduced exactly.
    #[inline]
    pub fn coord(&self, i: usize) -> T {
        if i + 1 == self.points {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * T::from_count(i) / T::from_count(self.points - 1)
    }

    /// Composite quadrature weights: Simpson for an odd point count, Simpson
    /// plus a closing 3/8 panel for an even one. Exact for cubics either way.
    pub fn quadrature_weights(&self) -> Vec<T> {
        let n = self.points;
        let h = self.spacing();
        let mut w = vec![T::zero(); n];
        let third = h / T::lit(3.0);
        let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
        let mut i = 0;
        while i < simpson_end {
            w[i] = w[i] + third;
            w[i + 1] = w[i + 1] + T::lit(4.0) * third;
            w[i + 2] = w[i + 2] + third;
            i += 2;
        }
        if n.is_multiple_of(2) {
            let e = T::lit(3.0) * h / T::lit(8.0);
            let s = n - 4;
            w[s] = w[s] + e;
            w[s + 1] = w[s + 1] + T::lit(3.0) * e;
            w[s + 2] = w[s + 2] + T::lit(3.0) * e;
            w[s + 3] = w[s + 3] + e;
        }
        w
    }
}

/// Uniform tensor-product grid over a box in `R^k`. Points are ordered
/// row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    axes: Vec<Axis<T>>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(axes: Vec<Axis<T>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (a, axis) in axes.iter().enumerate() {
            if axis.points < 3 {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} has {} points, at least 3 are required",
                    axis.points
                )));
            }
            if !(axis.lo < axis.hi) || !axis.lo.is_finite() || !axis.hi.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} bounds must satisfy lo < hi"
                )));
            }
        }
        Ok(Self { axes })
    }

    /// The cube `[lo, hi]^k` with `points` nodes per axis.
    pub fn cube(k: usize, lo: T, hi: T, points: usize) -> Result<Self> {
        Self::new(vec![Axis { lo, hi, points }; k])
    }

    pub fn line(lo: T, hi: T, points: usize) -> Result<Self> {
        Self::cube(1, lo, hi, points)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &Axis<T> {
        &self.axes[a]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> Vec<T> {
        self.axes.iter().map(Axis::spacing).collect()
    }

    pub fn cell_volume(&self) -> T {
        self.axes
            .iter()
            .map(Axis::spacing)
            .fold(T::one(), |a, b| a * b)
    }

    /// Stride of axis `a` in the flat ordering.
    pub fn stride(&self, a: usize) -> usize {
        self.axes[a + 1..].iter().map(|x| x.points).product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.axes[a].points;
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, axis)| acc * axis.points + i)
    }

    pub fn point_into(&self, flat: usize, buf: &mut [T]) {
        let mut rem = flat;
        for a in (0..self.dim()).rev() {
            let n = self.axes[a].points;
            buf[a] = self.axes[a].coord(rem % n);
            rem /= n;
        }
    }

    pub fn point(&self, flat: usize) -> Vec<T> {
        let mut p = vec![T::zero(); self.dim()];
        self.point_into(flat, &mut p);
        p
    }

    /// All grid points in flat order.
    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Whether the flat point lies on the outer face of the box.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .any(|(&i, axis)| i == 0 || i + 1 == axis.points)
    }

    /// Flat quadrature weights, products of the per-axis weights.
    pub fn quadrature_weights(&self) -> Vec<T> {
        let per_axis: Vec<Vec<T>> = self.axes.iter().map(Axis::quadrature_weights).collect();
        (0..self.len())
            .map(|flat| {
                self.multi_index(flat)
                    .iter()
                    .enumerate()
                    .fold(T::one(), |acc, (a, &i)| acc * per_axis[a][i])
            })
            .collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.axes)
                .all(|(&v, axis)| v >= axis.lo && v <= axis.hi)
    }

    /// Whether the closed Euclidean ball of radius `r` around `center` lies in the box.
    pub fn contains_ball(&self, center: &[T], r: T) -> bool {
        center.len() == self.dim()
            && center
                .iter()
                .zip(&self.axes)
                .all(|(&c, axis)| c - r >= axis.lo && c + r <= axis.hi)
    }

    /// Locates a grid node matching `x` to within a small fraction of the spacing.
    pub fn locate(&self, x: &[T]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (&v, axis) in x.iter().zip(&self.axes) {
            let h = axis.spacing();
            let t = (v - axis.lo) / h;
            let i = t.round();
            if i < T::zero() || i > T::from_count(axis.points - 1) {
                return None;
            }
            let i = i.to_usize()?;
            if (axis.coord(i) - v).abs() > h * T::lit(1e-9) {
                return None;
            }
            idx.push(i);
        }
        Some(self.flat_index(&idx))
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            bounds: self
                .axes
                .iter()
                .map(|a| [a.lo.to_f64_lossy(), a.hi.to_f64_lossy()])
                .collect(),
            points: self.axes.iter().map(|a| a.points).collect(),
        }
    }

    /// The same box with `factor` times as many intervals per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            axes: self
                .axes
                .iter()
                .map(|a| Axis {
                    lo: a.lo,
                    hi: a.hi,
                    points: (a.points - 1) * factor + 1,
                })
                .collect(),
        }
    }
}

/// Serializable summary of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub bounds: Vec<[f64; 2]>,
    pub points: Vec<usize>,
}

impl GridDescriptor {
    pub fn to_grid<T: Scalar>(&self) -> Result<Grid<T>> {
        if self.bounds.len() != self.points.len() {
            return Err(Error::InvalidGrid(
                "bounds and points differ in length".into(),
            ));
        }
        Grid::new(
            self.bounds
                .iter()
                .zip(&self.points)
                .map(|(b, &n)| Axis {
                    lo: T::lit(b[0]),
                    hi: T::lit(b[1]),
                    points: n,
                })
                .collect(),
        )
    }
}

/// Result of a tensor-product quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureValue<T, V> {
    pub value: V,
    pub cell_volume: T,
}

/// Composite Simpson quadrature of grid values, summed in flat order.
pub fn quadrature_values<T: Scalar, V: FieldValue<T>>(
    grid: &Grid<T>,
    values: &[V],
) -> Result<QuadratureValue<T, V>> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    if let Some(bad) = values.iter().position(|v| !v.is_finite_value()) {
        return Err(Error::NonFinite(format!(
            "quadrature integrand at flat index {bad}"
        )));
    }
    let weights = grid.quadrature_weights();
    let value = values
        .iter()
        .zip(&weights)
        .fold(V::zero(), |acc, (&v, &w)| acc + v * w);
    Ok(QuadratureValue {
        value,
        cell_volume: grid.cell_volume(),
    })
}

/// Quadrature of a pointwise integrand evaluated on the grid.
pub fn integrate<T: Scalar, F: Fn(&[T]) -> T>(grid: &Grid<T>, f: F) -> Result<T> {
    let mut buf = vec![T::zero(); grid.dim()];
    let values: Vec<T> = (0..grid.len())
        .map(|i| {
            grid.point_into(i, &mut buf);
            f(&buf)
        })
        .collect();
    quadrature_values(grid, &values).map(|q| q.value)
}
