use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};
use crate::funcspace::{Grid, MultiIndex, SmoothRef};
use crate::scalar::Scalar;

/// A two-variable function `h(x, y)` given by formula.
#[derive(Clone)]
pub enum KernelFn<T: Scalar> {
    /// `exp(-|x - y|^2)`, `x, y` in `R^k`.
    GaussianDifference { k: usize },
    /// `exp(-|x|^2 - |y|^2)`.
    GaussianProduct { kx: usize, ky: usize },
    /// `min(x, y)` on `R x R`.
    Min,
    /// `f(x) g(y)`.
    Tensor {
        left: SmoothRef<T, T>,
        right: SmoothRef<T, T>,
    },
    /// Expression in `x0.., y0..`.
    Expr {
        kx: usize,
        ky: usize,
        expr: Arc<Expr>,
    },
}

impl<T: Scalar> fmt::Debug for KernelFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GaussianDifference { k } => write!(f, "GaussianDifference(k={k})"),
            Self::GaussianProduct { kx, ky } => write!(f, "GaussianProduct({kx}, {ky})"),
            Self::Min => f.write_str("Min"),
            Self::Tensor { left, right } => write!(f, "Tensor({}, {})", left.dim(), right.dim()),
            Self::Expr { expr, .. } => write!(f, "Expr({})", expr.source()),
        }
    }
}

/// Physicists' Hermite polynomial `H_n(u)`.
fn hermite_poly<T: Scalar>(n: usize, u: T) -> T {
    let (mut a, mut b) = (T::one(), u + u);
    if n == 0 {
        return a;
    }
    for j in 1..n {
        let next = (u + u) * b - T::lit(2.0) * T::from_count(j) * a;
        a = b;
        b = next;
    }
    b
}

/// `d^mu exp(-|u|^2) = prod_i (-1)^{mu_i} H_{mu_i}(u_i) exp(-u_i^2)`.
fn gaussian_derivative<T: Scalar>(mu: &MultiIndex, u: &[T]) -> T {
    u.iter()
        .zip(mu.components())
        .fold(T::one(), |acc, (&ui, &n)| {
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            acc * sign * hermite_poly(n, ui) * (-ui * ui).exp()
        })
}

impl<T: Scalar> KernelFn<T> {
    pub fn expr(kx: usize, ky: usize, source: &str) -> Result<Self> {
        let expr = Expr::parse(source)?;
        expr.check_dims(kx, ky)?;
        Ok(Self::Expr {
            kx,
            ky,
            expr: Arc::new(expr),
        })
    }

    pub fn x_dim(&self) -> usize {
        match self {
            Self::GaussianDifference { k } => *k,
            Self::GaussianProduct { kx, .. } | Self::Expr { kx, .. } => *kx,
            Self::Min => 1,
            Self::Tensor { left, .. } => left.dim(),
        }
    }

    pub fn y_dim(&self) -> usize {
        match self {
            Self::GaussianDifference { k } => *k,
            Self::GaussianProduct { ky, .. } | Self::Expr { ky, .. } => *ky,
            Self::Min => 1,
            Self::Tensor { right, .. } => right.dim(),
        }
    }

    pub fn value(&self, x: &[T], y: &[T]) -> T {
        match self {
            Self::GaussianDifference { .. } => (-x
                .iter()
                .zip(y)
                .fold(T::zero(), |a, (&p, &q)| a + (p - q) * (p - q)))
            .exp(),
            Self::GaussianProduct { .. } => {
                (-x.iter().chain(y).fold(T::zero(), |a, &v| a + v * v)).exp()
            }
            Self::Min => x[0].min(y[0]),
            Self::Tensor { left, right } => left.value(x) * right.value(y),
            Self::Expr { expr, .. } => expr.eval(&Bindings { x, y, index: None }),
        }
    }

    /// Whether `x_derivative` is available.
    pub fn has_x_derivative(&self) -> bool {
        matches!(
            self,
            Self::GaussianDifference { .. } | Self::GaussianProduct { .. } | Self::Tensor { .. }
        )
    }

    /// Exact `d^mu_x h(x, y)`.
    pub fn x_derivative(&self, mu: &MultiIndex, x: &[T], y: &[T]) -> Option<T> {
        match self {
            Self::GaussianDifference { .. } => {
                let u: Vec<T> = x.iter().zip(y).map(|(&p, &q)| p - q).collect();
                Some(gaussian_derivative(mu, &u))
            }
            Self::GaussianProduct { .. } => {
                let gy = (-y.iter().fold(T::zero(), |a, &v| a + v * v)).exp();
                Some(gaussian_derivative(mu, x) * gy)
            }
            Self::Tensor { left, right } => Some(left.derivative(mu, x) * right.value(y)),
            Self::Min | Self::Expr { .. } => None,
        }
    }

    /// `(f, g)` when the kernel is an explicit tensor product.
    pub fn factors(&self) -> Option<(&SmoothRef<T, T>, &SmoothRef<T, T>)> {
        match self {
            Self::Tensor { left, right } => Some((left, right)),
            _ => None,
        }
    }
}

/// Values `h(x_i, y_j)` on a product of grids, rows indexed by `x`.
#[derive(Clone, Debug)]
pub struct TwoVariableFunction<T: Scalar> {
    x_grid: Grid<T>,
    y_grid: Grid<T>,
    /// Row-major `nx * ny`.
    values: Vec<T>,
    kernel: Option<KernelFn<T>>,
}

impl<T: Scalar> TwoVariableFunction<T> {
    pub fn from_values(x_grid: Grid<T>, y_grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != x_grid.len() * y_grid.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} x {} values, got {}",
                x_grid.len(),
                y_grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let (r, c) = (i / y_grid.len(), i % y_grid.len());
            return Err(Error::NonFinite(format!(
                "h at {:?}, {:?}",
                x_grid.point(r),
                y_grid.point(c)
            )));
        }
        Ok(Self {
            x_grid,
            y_grid,
            values,
            kernel: None,
        })
    }

    pub fn from_kernel(kernel: KernelFn<T>, x_grid: Grid<T>, y_grid: Grid<T>) -> Result<Self> {
        if kernel.x_dim() != x_grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.x_dim(),
                got: x_grid.dim(),
            });
        }
        if kernel.y_dim() != y_grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.y_dim(),
                got: y_grid.dim(),
            });
        }
        let ys = y_grid.points();
        let values: Vec<T> = (0..x_grid.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let x = x_grid.point(i);
                ys.iter().map(|y| kernel.value(&x, y)).collect::<Vec<_>>()
            })
            .collect();
        let mut out = Self::from_values(x_grid, y_grid, values)?;
        out.kernel = Some(kernel);
        Ok(out)
    }

    pub fn x_grid(&self) -> &Grid<T> {
        &self.x_grid
    }

    pub fn y_grid(&self) -> &Grid<T> {
        &self.y_grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn kernel(&self) -> Option<&KernelFn<T>> {
        self.kernel.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.x_grid.len()
    }

    pub fn cols(&self) -> usize {
        self.y_grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.cols()..(i + 1) * self.cols()]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_closed_forms() {
        let u = 0.7f64;
        assert_eq!(hermite_poly(0, u), 1.0);
        assert_eq!(hermite_poly(1, u), 2.0 * u);
        assert!((hermite_poly(3, u) - (8.0 * u * u * u - 12.0 * u)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_x_derivative_matches_fd() {
        let k = KernelFn::<f64>::GaussianDifference { k: 1 };
        let (x, y, h) = (0.3, -0.4, 1e-5);
        let d = k
            .x_derivative(&MultiIndex::new(vec![1]), &[x], &[y])
            .unwrap();
        let fd = (k.value(&[x + h], &[y]) - k.value(&[x - h], &[y])) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8);
        let d2 = k
            .x_derivative(&MultiIndex::new(vec![2]), &[x], &[y])
            .unwrap();
        let fd2 = (k.value(&[x + h], &[y]) - 2.0 * k.value(&[x], &[y]) + k.value(&[x - h], &[y]))
            / (h * h);
        assert!((d2 - fd2).abs() < 1e-4);
    }

    #[test]
    fn layout_and_validation() {
        let xg = Grid::line(0.0, 1.0, 3).unwrap();
        let yg = Grid::line(0.0, 2.0, 5).unwrap();
        let h = TwoVariableFunction::from_kernel(KernelFn::Min, xg.clone(), yg.clone()).unwrap();
        assert_eq!((h.rows(), h.cols()), (3, 5));
        assert_eq!(h.get(2, 4), 1.0);
        assert_eq!(h.get(1, 0), 0.0);
        assert!(TwoVariableFunction::from_values(xg.clone(), yg.clone(), vec![0.0; 14]).is_err());
        assert!(TwoVariableFunction::from_values(xg, yg, vec![f64::NAN; 15]).is_err());
        let e = KernelFn::<f64>::expr(1, 1, "x0 * y0 + 1").unwrap();
        assert_eq!(e.value(&[2.0], &[3.0]), 7.0);
        assert!(KernelFn::<f64>::expr(1, 1, "y1").is_err());
    }
}
