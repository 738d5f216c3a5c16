use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::family::DefiningFamily;
use super::sampling::ball_samples;
use super::weight::IndexLabel;
use crate::error::{Error, Result};
use crate::funcspace::{quadrature_values, Grid};
use crate::scalar::Scalar;

/// Number of failing points listed in a report; the count is always exact.
pub const MAX_LISTED_FAILURES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    /// Largest normalized ratio; the check passes when it is `<= 1 + tol`.
    pub worst_ratio: f64,
    pub worst_at: Option<Vec<f64>>,
    pub evaluated: usize,
    /// Points where both sides vanish.
    pub skipped: usize,
    pub failure_count: usize,
    pub failures: Vec<Vec<f64>>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            passed: true,
            worst_ratio: 0.0,
            worst_at: None,
            evaluated: 0,
            skipped: 0,
            failure_count: 0,
            failures: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn fail_at(&mut self, at: Vec<f64>) {
        self.passed = false;
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(at);
        }
    }
}

/// Options for the condition (I) decay surrogate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayOptions<T> {
    pub tol: T,
    /// `max_shell L / max_grid L` must not exceed this.
    pub decay_threshold: T,
}

impl<T: Scalar> Default for DecayOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-9),
            decay_threshold: T::lit(0.5),
        }
    }
}

/// Outcome of comparing `lhs <= rhs` at one point.
#[derive(Clone, Copy)]
enum Cmp<T> {
    Both0,
    Ratio(T),
    /// `rhs = 0 < lhs`.
    Unbounded,
}

fn compare<T: Scalar>(lhs: T, rhs: T) -> Cmp<T> {
    if rhs > T::zero() {
        Cmp::Ratio(lhs / rhs)
    } else if lhs > T::zero() {
        Cmp::Unbounded
    } else {
        Cmp::Both0
    }
}

fn to_f64<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

fn check_grid<T: Scalar>(family: &DefiningFamily<T>, grid: &Grid<T>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: grid.dim(),
        });
    }
    Ok(())
}

/// Folds per-point comparisons in flat grid order.
fn reduce<T: Scalar>(report: &mut CheckReport, grid: &Grid<T>, cmps: &[(Cmp<T>, Vec<T>)], tol: T) {
    let limit = T::one() + tol;
    let mut worst = T::neg_infinity();
    for (i, (c, at)) in cmps.iter().enumerate() {
        report.evaluated += 1;
        let loc = || {
            let mut p = to_f64(&grid.point(i));
            p.extend(to_f64(at));
            p
        };
        match *c {
            Cmp::Both0 => report.skipped += 1,
            Cmp::Unbounded => {
                if worst < T::infinity() {
                    worst = T::infinity();
                    report.worst_at = Some(loc());
                }
                report.fail_at(loc());
            }
            Cmp::Ratio(r) => {
                if r > worst {
                    worst = r;
                    report.worst_at = Some(loc());
                }
                if !(r <= limit) {
                    report.fail_at(loc());
                }
            }
        }
    }
    report.worst_ratio = if worst == T::neg_infinity() {
        0.0
    } else {
        worst.to_f64_lossy()
    };
}

/// Condition (a): `C (M_g1 + M_g2) <= M_g` on the grid.
pub fn check_condition_a<T: Scalar>(
    family: &DefiningFamily<T>,
    g1: &IndexLabel<T>,
    g2: &IndexLabel<T>,
    g: &IndexLabel<T>,
    c: T,
    grid: &Grid<T>,
    tol: T,
) -> Result<CheckReport> {
    check_grid(family, grid)?;
    if !(c > T::zero()) {
        return Err(Error::InvalidParams(
            "condition (a) constant must be positive".into(),
        ));
    }
    let m1 = family.weight(g1)?.values_on(grid)?;
    let m2 = family.weight(g2)?.values_on(grid)?;
    let m = family.weight(g)?.values_on(grid)?;
    let cmps: Vec<(Cmp<T>, Vec<T>)> = (0..grid.len())
        .map(|i| (compare(c * (m1[i] + m2[i]), m[i]), Vec::new()))
        .collect();
    let mut report = CheckReport::new(format!("condition-a[{g1}, {g2} -> {g}]"));
    reduce(&mut report, grid, &cmps, tol);
    report.metrics.insert("constant".into(), c.to_f64_lossy());
    if report.skipped > 0 {
        report
            .notes
            .push(format!("{} points with 0/0 skipped", report.skipped));
    }
    Ok(report)
}

/// Condition (c) surrogate: some listed weight is positive at every grid point.
pub fn check_condition_c<T: Scalar>(
    family: &DefiningFamily<T>,
    grid: &Grid<T>,
) -> Result<CheckReport> {
    check_grid(family, grid)?;
    let tables = family
        .members()
        .iter()
        .map(|m| m.weight.values_on(grid))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new("condition-c");
    let mut min_best = T::infinity();
    for i in 0..grid.len() {
        report.evaluated += 1;
        let best = tables.iter().fold(T::zero(), |m, t| m.max(t[i]));
        min_best = min_best.min(best);
        if !(best > T::zero()) {
            report.fail_at(to_f64(&grid.point(i)));
        }
    }
    report.worst_ratio = if report.failure_count > 0 { 1.0 } else { 0.0 };
    report
        .metrics
        .insert("min_max_weight".into(), min_best.to_f64_lossy());
    Ok(report)
}

/// Condition (I): pointwise `M_g <= L M_g'`, quadrature of `L^p` and the
/// shell decay test.
pub fn check_condition_i<T: Scalar>(
    family: &DefiningFamily<T>,
    g: &IndexLabel<T>,
    grid: &Grid<T>,
    p: T,
    opts: DecayOptions<T>,
) -> Result<CheckReport> {
    check_grid(family, grid)?;
    if !(p >= T::one()) {
        return Err(Error::InvalidParams("exponent p must be >= 1".into()));
    }
    let w = family.cond_i(g)?;
    let m = family.weight(g)?.values_on(grid)?;
    let mt = family.weight(&w.target)?.values_on(grid)?;
    let l = w.l.values_on(grid)?;
    let cmps: Vec<(Cmp<T>, Vec<T>)> = (0..grid.len())
        .map(|i| (compare(m[i], l[i] * mt[i]), Vec::new()))
        .collect();
    let mut report = CheckReport::new(format!("condition-I[{g} -> {}]", w.target));
    reduce(&mut report, grid, &cmps, opts.tol);

    let lp: Vec<T> = l.iter().map(|v| v.powf(p)).collect();
    let integral = quadrature_values(grid, &lp)?.value;
    if !integral.is_finite() {
        return Err(Error::NonFinite("quadrature of L^p".into()));
    }
    let global = l.iter().fold(T::zero(), |a, &b| a.max(b));
    let shell = (0..grid.len())
        .filter(|&i| grid.is_boundary(i))
        .fold(T::zero(), |a, i| a.max(l[i]));
    let decay = if global > T::zero() {
        shell / global
    } else {
        T::zero()
    };
    if !(decay <= opts.decay_threshold) {
        report.passed = false;
        report.notes.push(format!(
            "L does not decay: shell max / global max = {decay} exceeds {}",
            opts.decay_threshold
        ));
    }
    report
        .metrics
        .insert("integral_l_p".into(), integral.to_f64_lossy());
    report
        .metrics
        .insert("shell_max".into(), shell.to_f64_lossy());
    report
        .metrics
        .insert("global_max".into(), global.to_f64_lossy());
    report
        .metrics
        .insert("shell_ratio".into(), decay.to_f64_lossy());
    report.metrics.insert("p".into(), p.to_f64_lossy());
    report
        .notes
        .push("summability certified on the grid box only".into());
    Ok(report)
}

/// Condition (II): `M_g(x) <= C M_g'(x + y)` for sampled `|y| <= rho`.
/// Ratios are normalized by `C`; `raw_worst_ratio` is `M_g / M_g'`.
pub fn check_condition_ii<T: Scalar>(
    family: &DefiningFamily<T>,
    g: &IndexLabel<T>,
    grid: &Grid<T>,
    ball_points: usize,
    tol: T,
) -> Result<CheckReport> {
    check_grid(family, grid)?;
    let w = family.cond_ii(g)?;
    let samples = ball_samples(family.dim(), w.radius, ball_points);
    let m = family.weight(g)?.values_on(grid)?;
    let target = family.weight(&w.target)?.clone();
    let k = family.dim();
    let c = w.constant;
    let cmps: Vec<(Cmp<T>, Vec<T>)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let mut shifted = vec![T::zero(); k];
            let mut worst: Option<(Cmp<T>, usize)> = None;
            for (j, y) in samples.iter().enumerate() {
                for a in 0..k {
                    shifted[a] = x[a] + y[a];
                }
                let cmp = compare(m[i], c * target.eval(&shifted));
                let rank = |c: &Cmp<T>| match c {
                    Cmp::Both0 => T::neg_infinity(),
                    Cmp::Ratio(r) => *r,
                    Cmp::Unbounded => T::infinity(),
                };
                if worst.as_ref().is_none_or(|(wc, _)| rank(&cmp) > rank(wc)) {
                    worst = Some((cmp, j));
                }
            }
            let (cmp, j) = worst.expect("at least one sample");
            (cmp, samples[j].clone())
        })
        .collect();
    let mut report = CheckReport::new(format!("condition-II[{g} -> {}]", w.target));
    reduce(&mut report, grid, &cmps, tol);
    report.metrics.insert("constant".into(), c.to_f64_lossy());
    report
        .metrics
        .insert("radius".into(), w.radius.to_f64_lossy());
    report.metrics.insert(
        "raw_worst_ratio".into(),
        report.worst_ratio * c.to_f64_lossy(),
    );
    report
        .metrics
        .insert("ball_samples".into(), samples.len() as f64);
    Ok(report)
}

/// Every check a family supports on one grid: (a) for each index and its
/// successor, (c), and (I)/(II) for every index carrying a witness.
pub fn check_family<T: Scalar>(
    family: &DefiningFamily<T>,
    grid: &Grid<T>,
    p: T,
    ball_points: usize,
    opts: DecayOptions<T>,
) -> Result<Vec<CheckReport>> {
    let idx = family.indices();
    let mut out = Vec::new();
    for pair in idx.windows(2) {
        if let Ok((g, c)) = family.cond_a_witness(&pair[0], &pair[1]) {
            out.push(check_condition_a(
                family, &pair[0], &pair[1], &g, c, grid, opts.tol,
            )?);
        }
    }
    out.push(check_condition_c(family, grid)?);
    for g in &idx {
        if family.member(g)?.cond_i.is_some() {
            out.push(check_condition_i(family, g, grid, p, opts)?);
        }
    }
    for g in &idx {
        if family.member(g)?.cond_ii.is_some() {
            out.push(check_condition_ii(family, g, grid, ball_points, opts.tol)?);
        }
    }
    Ok(out)
}
