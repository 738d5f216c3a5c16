//! Weighted low-rank separable approximation and singular-value decay.
//!
//! The norm is the weighted `L^2` (Hilbert-Schmidt) norm on the grid,
//! `||h||^2 = sum_ij w_i w_j M(x_i)^2 N(y_j)^2 h(x_i, y_j)^2` with quadrature
//! weights `w`, a computable surrogate for the projective tensor norm. The
//! factorization runs in `f64`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::function::TwoVariableFunction;
use crate::error::{Error, Result};
use crate::funcspace::Grid;
use crate::scalar::Scalar;
use crate::weights::WeightFunction;

pub const NORM_LABEL: &str = "weighted-L2 (Hilbert-Schmidt) grid surrogate";

/// Retained grid nodes and their scalings `M(x) sqrt(w)`.
struct Scaling {
    keep: Vec<usize>,
    d: Vec<f64>,
}

fn scaling<T: Scalar>(grid: &Grid<T>, w: &WeightFunction<T>) -> Result<Scaling> {
    if w.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: w.dim(),
        });
    }
    let vals = w.values_on(grid)?;
    let q = grid.quadrature_weights();
    let mut keep: Vec<usize> = Vec::with_capacity(grid.len());
    let mut d = Vec::with_capacity(grid.len());
    for (i, (&m, &qi)) in vals.iter().zip(&q).enumerate() {
        if m.is_zero() {
            if w.has_zeros() {
                continue;
            }
            return Err(Error::ZeroWeight(
                grid.point(i).iter().map(|v| v.to_f64_lossy()).collect(),
            ));
        }
        keep.push(i);
        d.push(m.to_f64_lossy() * qi.to_f64_lossy().sqrt());
    }
    Ok(Scaling { keep, d })
}

fn weighted_matrix<T: Scalar>(
    h: &TwoVariableFunction<T>,
    wx: &WeightFunction<T>,
    wy: &WeightFunction<T>,
) -> Result<(Mat<f64>, Scaling, Scaling)> {
    let sx = scaling(h.x_grid(), wx)?;
    let sy = scaling(h.y_grid(), wy)?;
    let b = Mat::from_fn(sx.keep.len(), sy.keep.len(), |a, c| {
        sx.d[a] * h.get(sx.keep[a], sy.keep[c]).to_f64_lossy() * sy.d[c]
    });
    Ok((b, sx, sy))
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    v
}

/// `residual[r] = (sum_{i > r} s_i^2)^{1/2}` for `r = 0..=len`.
fn tail_norms(s: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.len() + 1];
    let mut acc = 0.0;
    for i in (0..s.len()).rev() {
        acc += s[i] * s[i];
        out[i] = acc.sqrt();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SeparableApproximation<T> {
    pub rank: usize,
    /// `left[i]` on the x-grid, already multiplied by `s_i`.
    pub left: Vec<Vec<T>>,
    /// `right[i]` on the y-grid.
    pub right: Vec<Vec<T>>,
    /// Every singular value of the weighted matrix, nonincreasing.
    pub singular_values: Vec<T>,
    pub residual: T,
    pub norm: &'static str,
}

impl<T: Scalar> SeparableApproximation<T> {
    /// `sum_i left_i(x) right_i(y)` on the product grid, row-major.
    pub fn reconstruct(&self) -> Vec<T> {
        let nx = self.left.first().map_or(0, Vec::len);
        let ny = self.right.first().map_or(0, Vec::len);
        let mut out = vec![T::zero(); nx * ny];
        for (l, r) in self.left.iter().zip(&self.right) {
            for i in 0..nx {
                if l[i].is_zero() {
                    continue;
                }
                for j in 0..ny {
                    out[i * ny + j] = out[i * ny + j] + l[i] * r[j];
                }
            }
        }
        out
    }
}

/// Truncated SVD of `D_M H D_N`, factors returned unweighted. Zero rows or
/// columns of indicator weights are dropped and come back as zeros.
pub fn separable_approx<T: Scalar>(
    h: &TwoVariableFunction<T>,
    wx: &WeightFunction<T>,
    wy: &WeightFunction<T>,
    r: usize,
) -> Result<SeparableApproximation<T>> {
    if r == 0 {
        return Err(Error::InvalidParams("rank must be at least 1".into()));
    }
    let (b, sx, sy) = weighted_matrix(h, wx, wy)?;
    let max = b.nrows().min(b.ncols());
    if max == 0 {
        return Err(Error::ZeroWeight(Vec::new()));
    }
    if r > max {
        return Err(Error::RankTooLarge { rank: r, max });
    }
    let svd = b
        .thin_svd()
        .map_err(|e| Error::NonFinite(format!("SVD did not converge: {e:?}")))?;
    let (u, v, sv) = (svd.U(), svd.V(), svd.S().column_vector());
    let mut order: Vec<usize> = (0..max).collect();
    order.sort_by(|&a, &c| sv[c].partial_cmp(&sv[a]).expect("finite"));
    let s: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let mut left = Vec::with_capacity(r);
    let mut right = Vec::with_capacity(r);
    for &col in order.iter().take(r) {
        let mut l = vec![T::zero(); h.rows()];
        for (a, &i) in sx.keep.iter().enumerate() {
            l[i] = T::lit(sv[col] * u[(a, col)] / sx.d[a]);
        }
        let mut rr = vec![T::zero(); h.cols()];
        for (c, &j) in sy.keep.iter().enumerate() {
            rr[j] = T::lit(v[(c, col)] / sy.d[c]);
        }
        left.push(l);
        right.push(rr);
    }
    let tails = tail_norms(&s);
    Ok(SeparableApproximation {
        rank: r,
        left,
        right,
        singular_values: s.iter().map(|&v| T::lit(v)).collect(),
        residual: T::lit(tails[r]),
        norm: NORM_LABEL,
    })
}

/// Weighted grid norm of `h - g` for `g` given on the same product grid.
pub fn weighted_distance<T: Scalar>(
    h: &TwoVariableFunction<T>,
    g: &[T],
    wx: &WeightFunction<T>,
    wy: &WeightFunction<T>,
) -> Result<T> {
    if g.len() != h.values().len() {
        return Err(Error::InvalidParams("candidate has the wrong shape".into()));
    }
    let sx = scaling(h.x_grid(), wx)?;
    let sy = scaling(h.y_grid(), wy)?;
    let mut acc = 0.0;
    for (a, &i) in sx.keep.iter().enumerate() {
        for (c, &j) in sy.keep.iter().enumerate() {
            let e = sx.d[a] * (h.get(i, j) - g[i * h.cols() + j]).to_f64_lossy() * sy.d[c];
            acc += e * e;
        }
    }
    Ok(T::lit(acc.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    GeometricOrFaster,
    SuperPolynomial,
    Polynomial,
    Slow,
}

/// Heuristic thresholds of the decay classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayThresholds {
    /// Singular values below `noise_floor * s_1` are ignored.
    pub noise_floor: f64,
    /// Geometric when the tail rate of `ln s_i` in `i` is at least this
    /// fraction of the head rate.
    pub geometric_ratio: f64,
    /// Super-polynomial when the tail log-log slope is at least this
    /// multiple of the head slope.
    pub superpolynomial_ratio: f64,
    /// Polynomial when the overall log-log slope is at least this.
    pub polynomial_min_slope: f64,
}

impl Default for DecayThresholds {
    fn default() -> Self {
        Self {
            noise_floor: 1e-12,
            geometric_ratio: 0.8,
            superpolynomial_ratio: 1.5,
            polynomial_min_slope: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub rank: usize,
    pub singular_value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySummary {
    pub classification: DecayClass,
    pub fit_slope: f64,
    #[serde(rename = "r_at_1e-8")]
    pub r_at_1e_8: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub summary: DecaySummary,
    /// Slope of `ln s_i` against `log i` over the retained values.
    pub loglog_slope: f64,
    /// Singular values above the noise floor within `r_max`.
    pub retained: usize,
    pub monotone: bool,
    pub thresholds: DecayThresholds,
    pub norm: &'static str,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,singular_value,residual\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                r.rank, r.singular_value, r.residual
            ));
        }
        out
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Decay class from the nonincreasing singular values `s`.
pub fn classify_decay(s: &[f64], th: &DecayThresholds) -> (DecayClass, f64, f64, usize) {
    let s1 = s.first().copied().unwrap_or(0.0);
    if !(s1 > 0.0) {
        return (DecayClass::GeometricOrFaster, 0.0, 0.0, 0);
    }
    let n = s.iter().take_while(|&&v| v > th.noise_floor * s1).count();
    let idx: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let logi: Vec<f64> = idx.iter().map(|i| i.ln()).collect();
    let logs: Vec<f64> = s[..n].iter().map(|v| v.ln()).collect();
    let fit = slope(&idx, &logs);
    let loglog = slope(&logi, &logs);
    if n < 4 {
        return (DecayClass::GeometricOrFaster, fit, loglog, n);
    }
    let half = n / 2;
    let rate = |a: usize, b: usize| -slope(&idx[a..b], &logs[a..b]);
    let beta = |a: usize, b: usize| -slope(&logi[a..b], &logs[a..b]);
    let (sh, st) = (rate(0, half), rate(half, n));
    let class = if st > 0.0 && st >= th.geometric_ratio * sh {
        DecayClass::GeometricOrFaster
    } else if beta(half, n) >= th.superpolynomial_ratio * beta(0, half).max(0.0)
        && beta(half, n) > 0.0
    {
        DecayClass::SuperPolynomial
    } else if -loglog >= th.polynomial_min_slope {
        DecayClass::Polynomial
    } else {
        DecayClass::Slow
    };
    (class, fit, loglog, n)
}

/// Residual-versus-rank table for ranks `1..=r_max` and a decay
/// classification, from the singular values of the weighted matrix.
pub fn density_decay_report<T: Scalar>(
    h: &TwoVariableFunction<T>,
    wx: &WeightFunction<T>,
    wy: &WeightFunction<T>,
    r_max: usize,
    thresholds: DecayThresholds,
) -> Result<DecayReport> {
    let (b, _, _) = weighted_matrix(h, wx, wy)?;
    let max = b.nrows().min(b.ncols());
    if max == 0 {
        return Err(Error::ZeroWeight(Vec::new()));
    }
    if r_max == 0 {
        return Err(Error::InvalidParams("r_max must be at least 1".into()));
    }
    if r_max > max {
        return Err(Error::RankTooLarge { rank: r_max, max });
    }
    let s = sorted_desc(
        b.singular_values()
            .map_err(|e| Error::NonFinite(format!("SVD did not converge: {e:?}")))?,
    );
    let tails = tail_norms(&s);
    let rows: Vec<DecayRow> = (1..=r_max)
        .map(|r| DecayRow {
            rank: r,
            singular_value: s[r - 1],
            residual: tails[r],
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].residual <= w[0].residual);
    let (classification, fit_slope, loglog_slope, retained) =
        classify_decay(&s[..r_max], &thresholds);
    let r_at = (1..tails.len()).find(|&r| tails[r] < 1e-8);
    Ok(DecayReport {
        rows,
        summary: DecaySummary {
            classification,
            fit_slope,
            r_at_1e_8: r_at,
        },
        loglog_slope,
        retained,
        monotone,
        thresholds,
        norm: NORM_LABEL,
    })
}
