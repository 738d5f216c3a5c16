//! Estimates for entire functions on `C^k`, sampled on `R^{2k}`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{common_grid, label, record, Comparison};
use super::tally::InequalityTally;
use crate::error::{Error, Result};
use crate::funcspace::{quadrature_values, Grid, SampledFunction};
use crate::scalar::{factorial, FieldValue, Scalar};
use crate::seminorms::{analytic_lp_seminorm, analytic_sup_seminorm, sup_seminorm};
use crate::weights::{DefiningFamily, IndexLabel};

type Entire<T> = SampledFunction<T, Complex<T>>;

fn complex_dim<T: Scalar>(family: &DefiningFamily<T>) -> Result<usize> {
    let d = family.dim();
    if !d.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "analytic family lives on R^{d}, an odd dimension"
        )));
    }
    Ok(d / 2)
}

/// Largest polydisk radius whose distinguished boundary fits in the `rho`-ball.
fn check_polydisk<T: Scalar>(r: T, k: usize, rho: T) -> Result<()> {
    let limit = rho / T::from_count(k).sqrt();
    if !(r > T::zero()) {
        return Err(Error::InvalidParams(
            "polydisk radius must be positive".into(),
        ));
    }
    if r > limit * (T::one() + T::epsilon() * T::lit(8.0)) {
        return Err(Error::RadiusTooLarge {
            radius: r.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundReport<T> {
    pub gamma: IndexLabel<T>,
    pub gamma_prime: IndexLabel<T>,
    pub m: usize,
    pub r: T,
    pub c: T,
    /// `max_{j <= m} j! r^{-j}`.
    pub factor: T,
    pub comparison: Comparison,
    pub passed: bool,
}

/// Checks `||f||_{g,m} <= C max_{j <= m} j! r^{-j} ||f||_{g'}` with `(g', rho, C)`
/// the condition (II) witness of `g` and `r sqrt(k) <= rho`.
pub fn cauchy_derivative_bound<T: Scalar>(
    f: &Entire<T>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    r: T,
    tol: T,
) -> Result<BoundReport<T>> {
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let k = complex_dim(family)?;
    let w = family.cond_ii(gamma)?;
    check_polydisk(r, k, w.radius)?;
    let factor = (0..=m).fold(T::zero(), |a, j| {
        a.max(factorial::<T>(j) * r.powi(-(j as i32)))
    });
    let lhs = sup_seminorm(f, family, gamma, m)?.value;
    let rhs = w.constant * factor * analytic_sup_seminorm(f, family, &w.target)?.value;
    let mut t = InequalityTally::new("cauchy", tol.to_f64_lossy());
    let comparison = record(&mut t, lhs, rhs, f.label());
    Ok(BoundReport {
        gamma: gamma.clone(),
        gamma_prime: w.target.clone(),
        m,
        r,
        c: w.constant,
        factor,
        passed: comparison.passed,
        comparison,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanValueOptions<T> {
    /// Simpson nodes on `[0, r]` per complex coordinate; 0 picks a default.
    pub radial: usize,
    /// Equispaced angles per complex coordinate; 0 picks a default.
    pub angular: usize,
    pub tol: T,
}

impl<T: Scalar> Default for MeanValueOptions<T> {
    fn default() -> Self {
        Self {
            radial: 0,
            angular: 0,
            tol: T::lit(1e-8),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanValueReport {
    pub value: [f64; 2],
    pub mean: [f64; 2],
    pub residual: f64,
    pub nodes: usize,
    pub passed: bool,
}

/// Disk rule: `(offset, weight)` with polar Simpson x trapezoid nodes.
fn disk_rule<T: Scalar>(r: T, radial: usize, angular: usize) -> Result<Vec<(Complex<T>, T)>> {
    let axis = Grid::line(T::zero(), r, radial)?;
    let wr = axis.axis(0).quadrature_weights();
    let dtheta = T::TAU() / T::from_count(angular);
    let mut out = Vec::with_capacity(radial * angular);
    for (i, &w) in wr.iter().enumerate().skip(1) {
        let rho = axis.axis(0).coord(i);
        for a in 0..angular {
            let th = dtheta * T::from_count(a);
            out.push((
                Complex::new(rho * th.cos(), rho * th.sin()),
                w * rho * dtheta,
            ));
        }
    }
    Ok(out)
}

/// `|f(z0) - (pi r^2)^{-k} int_{D_r(z0)} f d lambda|` over the polydisk.
pub fn mean_value_check<T: Scalar>(
    f: &Entire<T>,
    z0: &[Complex<T>],
    r: T,
    opts: MeanValueOptions<T>,
) -> Result<MeanValueReport> {
    let eval = f.exact().ok_or(Error::MissingEvaluator)?;
    let grid = f.grid();
    if !grid.dim().is_multiple_of(2) {
        return Err(Error::InvalidParams(
            "analytic functions live on R^{2k}".into(),
        ));
    }
    let k = grid.dim() / 2;
    if z0.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: z0.len(),
        });
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidParams("disk radius must be positive".into()));
    }
    let center: Vec<T> = z0.iter().flat_map(|z| [z.re, z.im]).collect();
    if !grid.contains_ball(&center, r) {
        return Err(Error::OutsideBox(
            center.iter().map(|v| v.to_f64_lossy()).collect(),
        ));
    }
    let (radial, angular) = match (opts.radial, opts.angular, k) {
        (0, 0, 1) => (401, 401),
        (0, 0, _) => (41, 64),
        (a, b, _) => (a.max(3), b.max(3)),
    };
    let rule = disk_rule(r, radial, angular)?;
    let n = rule.len();
    let total = n
        .checked_pow(k as u32)
        .ok_or_else(|| Error::InvalidParams("polydisk rule too large".into()))?;
    let partial: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut x = center.clone();
            let rest = total / n;
            for flat in 0..rest {
                let mut w = rule[first].1;
                x[0] = center[0] + rule[first].0.re;
                x[1] = center[1] + rule[first].0.im;
                let mut rem = flat;
                for j in 1..k {
                    let (off, wj) = rule[rem % n];
                    rem /= n;
                    x[2 * j] = center[2 * j] + off.re;
                    x[2 * j + 1] = center[2 * j + 1] + off.im;
                    w = w * wj;
                }
                acc = acc + eval.value(&x) * w;
            }
            acc
        })
        .collect();
    let sum = partial
        .into_iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
    let mean = sum / (T::PI() * r * r).powi(k as i32);
    let value = eval.value(&center);
    let residual = (value - mean).modulus();
    if !residual.is_finite() {
        return Err(Error::NonFinite("disk mean".into()));
    }
    Ok(MeanValueReport {
        value: [value.re.to_f64_lossy(), value.im.to_f64_lossy()],
        mean: [mean.re.to_f64_lossy(), mean.im.to_f64_lossy()],
        residual: residual.to_f64_lossy(),
        nodes: total,
        passed: residual <= opts.tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticEntry {
    pub label: String,
    pub forward: Option<Comparison>,
    pub reverse: Comparison,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AnalyticEquivalenceReport<T> {
    pub gamma: IndexLabel<T>,
    pub p: T,
    pub r: T,
    /// Condition (I) target and `A = (int L^p)^{1/p}`.
    pub forward_target: Option<IndexLabel<T>>,
    pub a: Option<T>,
    /// Condition (II) target and `C (pi r^2)^{-k/p}`.
    pub reverse_target: IndexLabel<T>,
    pub reverse_constant: T,
    pub entries: Vec<AnalyticEntry>,
    pub forward: Option<InequalityTally>,
    pub reverse: InequalityTally,
    pub passed: bool,
}

/// Checks `||f||^p_g <= A ||f||_{g'}` (condition (I)) and
/// `||f||_g <= C (pi r^2)^{-k/p} ||f||^p_{g'}` (condition (II)).
pub fn verify_analytic_lp_equivalence<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    p: T,
    corpus: &[Entire<T>],
    r: T,
    tol: T,
) -> Result<AnalyticEquivalenceReport<T>> {
    let grid = common_grid(corpus)?;
    let k = complex_dim(family)?;
    if grid.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: grid.dim(),
        });
    }
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidParams(
            "exponent p must be finite and >= 1".into(),
        ));
    }
    let w2 = family.cond_ii(gamma)?;
    check_polydisk(r, k, w2.radius)?;
    let reverse_constant = w2.constant * (T::PI() * r * r).powf(-T::from_count(k) / p);
    let w1 = family.cond_i(gamma).ok();
    let a = match w1 {
        Some(w) => {
            let l = w.l.values_on(grid)?;
            let lp: Vec<T> = l
                .iter()
                .map(|&v| if v.is_zero() { v } else { v.powf(p) })
                .collect();
            Some(quadrature_values(grid, &lp)?.value.powf(p.recip()))
        }
        None => None,
    };
    let sides: Vec<Result<(Option<(T, T)>, T, T)>> = corpus
        .par_iter()
        .map(|f| {
            let fwd = match (w1, a) {
                (Some(w), Some(a)) => Some((
                    analytic_lp_seminorm(f, family, gamma, p)?.value,
                    a * analytic_sup_seminorm(f, family, &w.target)?.value,
                )),
                _ => None,
            };
            let lhs = analytic_sup_seminorm(f, family, gamma)?.value;
            let rhs = reverse_constant * analytic_lp_seminorm(f, family, &w2.target, p)?.value;
            Ok((fwd, lhs, rhs))
        })
        .collect();
    let t = tol.to_f64_lossy();
    let mut forward = w1.map(|_| InequalityTally::new(format!("L^p <= A sup [{gamma}, p={p}]"), t));
    let mut reverse =
        InequalityTally::new(format!("sup <= C (pi r^2)^(-k/p) L^p [{gamma}, p={p}]"), t);
    let mut entries = Vec::with_capacity(corpus.len());
    for (i, (f, s)) in corpus.iter().zip(sides).enumerate() {
        let (fwd, lhs, rhs) = s?;
        let name = label(f, i);
        let fwd = match (fwd, forward.as_mut()) {
            (Some((l, r)), Some(tally)) => Some(record(tally, l, r, &name)),
            _ => None,
        };
        let rev = record(&mut reverse, lhs, rhs, &name);
        entries.push(AnalyticEntry {
            label: name,
            forward: fwd,
            reverse: rev,
        });
    }
    let passed = reverse.passed && forward.as_ref().is_none_or(|t| t.passed);
    Ok(AnalyticEquivalenceReport {
        gamma: gamma.clone(),
        p,
        r,
        forward_target: w1.map(|w| w.target.clone()),
        a,
        reverse_target: w2.target.clone(),
        reverse_constant,
        entries,
        forward,
        reverse,
        passed,
    })
}
