//! Slices, pairings with discrete functionals and the differentiation identity.

use serde::Serialize;

use super::function::{KernelFn, TwoVariableFunction};
use crate::error::{Error, Result};
use crate::funcspace::{fd_partial, DiscreteFunctional, Grid, MultiIndex, SampledFunction};
use crate::scalar::Scalar;

fn to_f64<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

/// The row `y -> h(x0, y)`.
pub fn slice<T: Scalar>(h: &TwoVariableFunction<T>, x0: &[T]) -> Result<SampledFunction<T>> {
    let i = h
        .x_grid()
        .locate(x0)
        .ok_or_else(|| Error::OffGrid(to_f64(x0)))?;
    SampledFunction::from_values(h.y_grid().clone(), h.row(i).to_vec())
}

/// Multilinear interpolation stencil of `y` on `grid`: `(flat index, weight)`.
fn stencil<T: Scalar>(grid: &Grid<T>, y: &[T]) -> Vec<(usize, T)> {
    let mut out = vec![(vec![], T::one())];
    for (a, &v) in y.iter().enumerate() {
        let axis = grid.axis(a);
        let t = (v - axis.lo) / axis.spacing();
        let last = axis.points - 1;
        let i0 = t
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(last.saturating_sub(1));
        let frac = (t - T::from_count(i0)).max(T::zero()).min(T::one());
        let mut next = Vec::with_capacity(out.len() * 2);
        for (idx, w) in out {
            let mut lo = idx.clone();
            lo.push(i0);
            next.push((lo, w * (T::one() - frac)));
            if last > 0 {
                let mut hi = idx;
                hi.push(i0 + 1);
                next.push((hi, w * frac));
            }
        }
        out = next;
    }
    out.into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(idx, w)| (grid.flat_index(&idx), w))
        .collect()
}

/// Columns and coefficients realizing `v` on the y-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnFunctional<T> {
    pub columns: Vec<(usize, T)>,
    /// Some functional point needed interpolation.
    pub interpolated: bool,
}

pub fn resolve_functional<T: Scalar>(
    grid: &Grid<T>,
    v: &DiscreteFunctional<T>,
    allow_interpolation: bool,
) -> Result<ColumnFunctional<T>> {
    if v.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: v.dim(),
        });
    }
    let mut columns = Vec::with_capacity(v.len());
    let mut interpolated = false;
    for (y, c) in v.terms() {
        if let Some(j) = grid.locate(y) {
            columns.push((j, c));
        } else if !grid.contains(y) {
            return Err(Error::OutsideBox(to_f64(y)));
        } else if allow_interpolation {
            interpolated = true;
            columns.extend(stencil(grid, y).into_iter().map(|(j, w)| (j, w * c)));
        } else {
            return Err(Error::OffGrid(to_f64(y)));
        }
    }
    Ok(ColumnFunctional {
        columns,
        interpolated,
    })
}

/// `h_v` on the x-grid together with the interpolation flag.
#[derive(Clone, Debug)]
pub struct FunctionalImage<T: Scalar> {
    pub function: SampledFunction<T>,
    pub interpolated: bool,
}

/// `h_v(x_i) = sum_j c_j h(x_i, y_j)`; off-grid points are interpolated
/// multilinearly when allowed.
pub fn apply_functional<T: Scalar>(
    h: &TwoVariableFunction<T>,
    v: &DiscreteFunctional<T>,
    allow_interpolation: bool,
) -> Result<FunctionalImage<T>> {
    let cf = resolve_functional(h.y_grid(), v, allow_interpolation)?;
    let values = (0..h.rows())
        .map(|i| {
            let row = h.row(i);
            cf.columns
                .iter()
                .fold(T::zero(), |a, &(j, c)| a + c * row[j])
        })
        .collect();
    let function = SampledFunction::from_values(h.x_grid().clone(), values)?;
    Ok(FunctionalImage {
        function,
        interpolated: cf.interpolated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffPath {
    /// `d^mu` of `v(g) f` from the exact factor.
    ExactTensor,
    /// Finite differences of `h_v` against `v` applied to the exact `d^mu_x h`.
    FiniteDifferenceVsExact,
    /// Finite differences on both sides.
    FiniteDifferenceBoth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffLevel {
    pub points: Vec<usize>,
    pub spacing: f64,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffIdentityReport {
    pub mu: Vec<usize>,
    pub path: DiffPath,
    pub levels: Vec<DiffLevel>,
    /// `error[l] / error[l + 1]`.
    pub ratios: Vec<f64>,
    /// `log2` of the ratios.
    pub orders: Vec<f64>,
    pub interpolated: bool,
}

/// Compares `d^mu h_v` with `v(d^mu_x h(x, .))` on `x_grid` refined by
/// factors `1, 2, 4, ...` (`levels` grids).
pub fn check_diff_identity<T: Scalar>(
    kernel: &KernelFn<T>,
    v: &DiscreteFunctional<T>,
    mu: &MultiIndex,
    x_grid: &Grid<T>,
    y_grid: &Grid<T>,
    levels: usize,
) -> Result<DiffIdentityReport> {
    if levels == 0 {
        return Err(Error::InvalidParams(
            "at least one refinement level is required".into(),
        ));
    }
    if mu.dim() != kernel.x_dim() {
        return Err(Error::DimensionMismatch {
            expected: kernel.x_dim(),
            got: mu.dim(),
        });
    }
    let path = if kernel.factors().is_some() {
        DiffPath::ExactTensor
    } else if kernel.has_x_derivative() {
        DiffPath::FiniteDifferenceVsExact
    } else {
        DiffPath::FiniteDifferenceBoth
    };
    let cf = resolve_functional(y_grid, v, true)?;
    let ys: Vec<(Vec<T>, T)> = cf
        .columns
        .iter()
        .map(|&(j, c)| (y_grid.point(j), c))
        .collect();
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        let xg = x_grid.refined(1 << l);
        let hv: Vec<T> = (0..xg.len())
            .map(|i| {
                let x = xg.point(i);
                ys.iter()
                    .fold(T::zero(), |a, (y, c)| a + *c * kernel.value(&x, y))
            })
            .collect();
        let error = if mu.is_zero() {
            T::zero()
        } else {
            let (lhs, rhs): (Vec<T>, Vec<T>) = match path {
                DiffPath::ExactTensor => {
                    let (f, g) = kernel.factors().expect("tensor kernel");
                    let vg = ys.iter().fold(T::zero(), |a, (y, c)| a + *c * g.value(y));
                    let lhs = (0..xg.len())
                        .map(|i| vg * f.derivative(mu, &xg.point(i)))
                        .collect();
                    let rhs = exact_rhs(kernel, mu, &xg, &ys);
                    (lhs, rhs)
                }
                DiffPath::FiniteDifferenceVsExact => {
                    (fd_partial(&xg, &hv, mu)?, exact_rhs(kernel, mu, &xg, &ys))
                }
                DiffPath::FiniteDifferenceBoth => {
                    let lhs = fd_partial(&xg, &hv, mu)?;
                    let mut rhs = vec![T::zero(); xg.len()];
                    for (y, c) in &ys {
                        let col: Vec<T> = (0..xg.len())
                            .map(|i| kernel.value(&xg.point(i), y))
                            .collect();
                        for (r, d) in rhs.iter_mut().zip(fd_partial(&xg, &col, mu)?) {
                            *r = *r + *c * d;
                        }
                    }
                    (lhs, rhs)
                }
            };
            lhs.iter()
                .zip(&rhs)
                .fold(T::zero(), |a, (&p, &q)| a.max((p - q).abs()))
        };
        if !error.is_finite() {
            return Err(Error::NonFinite("differentiation identity error".into()));
        }
        out.push(DiffLevel {
            points: xg.axes().iter().map(|a| a.points).collect(),
            spacing: xg
                .spacing()
                .iter()
                .fold(0.0f64, |a, h| a.max(h.to_f64_lossy())),
            max_error: error.to_f64_lossy(),
        });
    }
    let ratios: Vec<f64> = out
        .windows(2)
        .map(|w| w[0].max_error / w[1].max_error)
        .collect();
    let orders = ratios.iter().map(|r| r.log2()).collect();
    Ok(DiffIdentityReport {
        mu: mu.components().to_vec(),
        path,
        levels: out,
        ratios,
        orders,
        interpolated: cf.interpolated,
    })
}

fn exact_rhs<T: Scalar>(
    kernel: &KernelFn<T>,
    mu: &MultiIndex,
    xg: &Grid<T>,
    ys: &[(Vec<T>, T)],
) -> Vec<T> {
    (0..xg.len())
        .map(|i| {
            let x = xg.point(i);
            ys.iter().fold(T::zero(), |a, (y, c)| {
                a + *c * kernel.x_derivative(mu, &x, y).expect("exact x-derivative")
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::jet::Jet;
    use crate::funcspace::{JetSmooth, SmoothRef};

    fn tensor() -> KernelFn<f64> {
        let f: SmoothRef<f64, f64> = Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| x[0].exp()));
        let g: SmoothRef<f64, f64> = Arc::new(JetSmooth::new(1, |y: &[Jet<f64>]| {
            (&y[0] * &y[0]).add_scalar(1.0)
        }));
        KernelFn::Tensor { left: f, right: g }
    }

    #[test]
    fn slices() {
        let xg = Grid::<f64>::line(-2.0, 2.0, 41).unwrap();
        let yg = Grid::<f64>::line(-3.0, 3.0, 61).unwrap();
        let h = TwoVariableFunction::from_kernel(
            KernelFn::GaussianDifference { k: 1 },
            xg.clone(),
            yg.clone(),
        )
        .unwrap();
        let s = slice(&h, &[0.0]).unwrap();
        for (j, &v) in s.values().iter().enumerate() {
            let y = yg.point(j)[0];
            assert!((v - (-y * y).exp()).abs() < 1e-15);
        }
        assert!(matches!(slice(&h, &[0.05]), Err(Error::OffGrid(_))));
        let t = TwoVariableFunction::from_kernel(tensor(), xg.clone(), yg.clone()).unwrap();
        let s = slice(&t, &[1.0]).unwrap();
        assert!((s.values()[30] - 1.0f64.exp()).abs() < 1e-15);
        let zero = TwoVariableFunction::from_values(xg, yg, vec![0.0; 41 * 61]).unwrap();
        assert!(slice(&zero, &[1.0])
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn delta_is_column_and_quadrature_integrates() {
        let xg = Grid::<f64>::line(-3.0, 3.0, 61).unwrap();
        let yg = Grid::<f64>::line(-8.0, 8.0, 1601).unwrap();
        let h = TwoVariableFunction::from_kernel(
            KernelFn::GaussianProduct { kx: 1, ky: 1 },
            xg.clone(),
            yg.clone(),
        )
        .unwrap();
        let d = apply_functional(&h, &DiscreteFunctional::delta(vec![0.5]), false).unwrap();
        assert!(!d.interpolated);
        let j = yg.locate(&[0.5]).unwrap();
        assert_eq!(d.function.values(), h.column(j).as_slice());
        let q = apply_functional(&h, &DiscreteFunctional::quadrature(&yg), false).unwrap();
        for (i, &v) in q.function.values().iter().enumerate() {
            let x = xg.point(i)[0];
            assert!((v - std::f64::consts::PI.sqrt() * (-x * x).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn interpolation_and_box() {
        let xg = Grid::<f64>::line(0.0, 1.0, 3).unwrap();
        let yg = Grid::<f64>::line(0.0, 1.0, 11).unwrap();
        let h =
            TwoVariableFunction::from_kernel(KernelFn::expr(1, 1, "x0 + 2 * y0").unwrap(), xg, yg)
                .unwrap();
        let v = DiscreteFunctional::delta(vec![0.25]);
        assert!(matches!(
            apply_functional(&h, &v, false),
            Err(Error::OffGrid(_))
        ));
        let img = apply_functional(&h, &v, true).unwrap();
        assert!(img.interpolated);
        assert!((img.function.values()[2] - 1.5).abs() < 1e-14);
        assert!(matches!(
            apply_functional(&h, &DiscreteFunctional::delta(vec![1.5]), true),
            Err(Error::OutsideBox(_))
        ));
    }

    #[test]
    fn tensor_identity_is_exact() {
        let v =
            DiscreteFunctional::combination(vec![(vec![0.5], 2.0), (vec![-1.0], -0.3)]).unwrap();
        let xg = Grid::<f64>::line(-2.0, 2.0, 21).unwrap();
        let yg = Grid::<f64>::line(-2.0, 2.0, 41).unwrap();
        for order in 1..4 {
            let r = check_diff_identity(&tensor(), &v, &MultiIndex::new(vec![order]), &xg, &yg, 2)
                .unwrap();
            assert_eq!(r.path, DiffPath::ExactTensor);
            assert!(r.levels.iter().all(|l| l.max_error < 1e-12));
        }
    }

    #[test]
    fn gaussian_second_order() {
        let v = DiscreteFunctional::delta(vec![0.0]);
        let xg = Grid::<f64>::line(-3.0, 3.0, 61).unwrap();
        let yg = Grid::<f64>::line(-1.0, 1.0, 3).unwrap();
        let k = KernelFn::GaussianDifference { k: 1 };
        let r = check_diff_identity(&k, &v, &MultiIndex::new(vec![1]), &xg, &yg, 4).unwrap();
        for q in &r.ratios {
            assert!((3.5..=4.5).contains(q), "{:?}", r.ratios);
        }
        let r0 = check_diff_identity(&k, &v, &MultiIndex::new(vec![0]), &xg, &yg, 2).unwrap();
        assert!(r0.levels.iter().all(|l| l.max_error == 0.0));
    }
}
