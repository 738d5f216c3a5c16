//! Tail norms `||(1 - phi(./n)) f||^p_{g,m}` and their Leibniz majorants.

use std::sync::Arc;

use serde::Serialize;

use super::certificate::count;
use crate::error::{Error, Result};
use crate::funcspace::{
    quadrature_values, Grid, LeibnizProduct, SampledFunction, Smooth, SmoothRef, SmoothStep,
    TailCutoff,
};
use crate::scalar::{euclidean_norm, FieldValue, Scalar};
use crate::seminorms::{lp_seminorm, SeminormValue};
use crate::weights::{DefiningFamily, IndexLabel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffOptions<T> {
    pub tol: T,
    /// The last tail norm must fall below this.
    pub tail_tol: T,
}

impl<T: Scalar> Default for CutoffOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-9),
            tail_tol: T::lit(1e-6),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CutoffEntry<T> {
    pub n: T,
    pub value: SeminormValue<T>,
    /// `A 2^m q(m) (int_{|x| >= n} M^p sum |d^mu f|^p)^{1/p}`.
    pub majorant: T,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CutoffReport<T> {
    /// `1 + max_{|nu| <= m} sup |d^nu phi|`, sampled.
    pub leibniz_constant: T,
    pub entries: Vec<CutoffEntry<T>>,
    /// Values never increase along `n_list`.
    pub nonincreasing: bool,
    pub last_below_tail_tol: bool,
    pub passed: bool,
}

/// Sampled `max_{|nu| <= m} sup |d^nu phi|` over the transition shell `1 <= |x| <= 2`.
pub fn cutoff_derivative_sup<T: Scalar>(k: usize, m: usize) -> Result<T> {
    let phi = SmoothStep::new(k, T::one())?;
    let per_axis = match k {
        1 => 8001,
        2 => 401,
        3 => 81,
        _ => 21,
    };
    let grid = Grid::cube(k, T::lit(-2.0), T::lit(2.0), per_axis)?;
    let mut best = T::one();
    for i in 0..grid.len() {
        let x = grid.point(i);
        let r = euclidean_norm(&x);
        if r < T::one() || r > T::lit(2.0) {
            continue;
        }
        for d in phi.derivatives_upto(m, &x) {
            best = best.max(d.abs());
        }
    }
    Ok(best)
}

/// Computes `||psi_n f||^p_{g,m}` for `psi_n = 1 - phi(x/n)` and checks it
/// against the Leibniz majorant for every `n` in `n_list`.
pub fn cutoff_tail_norms<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    p: T,
    n_list: &[T],
    opts: CutoffOptions<T>,
) -> Result<CutoffReport<T>> {
    let grid = f.grid();
    let k = grid.dim();
    if k != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: k,
        });
    }
    let origin = vec![T::zero(); k];
    for &n in n_list {
        if !(n > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "cutoff radius {n} must be positive"
            )));
        }
        if !grid.contains_ball(&origin, n) {
            return Err(Error::OutsideBox(vec![n.to_f64_lossy(); k]));
        }
    }
    let a = T::one() + cutoff_derivative_sup::<T>(k, m)?;
    let (_, q) = count::<T>(k, m)?;
    let factor = a * T::lit(2.0).powi(m as i32) * q;
    let weight = family.weight(gamma)?.values_on(grid)?;
    let (table, _) = f.derivative_table(m)?;
    let radii: Vec<T> = (0..grid.len())
        .map(|i| euclidean_norm(&grid.point(i)))
        .collect();
    let base: Vec<T> = (0..grid.len())
        .map(|i| {
            if weight[i].is_zero() {
                return T::zero();
            }
            weight[i].powf(p)
                * table
                    .iter()
                    .fold(T::zero(), |s, col| s + col[i].modulus().powf(p))
        })
        .collect();

    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let cut = TailCutoff::new(k, n)?;
        let g = match f.exact() {
            Some(inner) => {
                let prod: SmoothRef<T, V> = Arc::new(LeibnizProduct {
                    factor: Arc::new(cut) as SmoothRef<T, T>,
                    inner: inner.clone(),
                });
                SampledFunction::from_smooth(grid.clone(), prod)?
            }
            None => {
                let vals = f
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v * cut.value(&grid.point(i)))
                    .collect();
                SampledFunction::from_values(grid.clone(), vals)?
            }
        };
        let value = lp_seminorm(&g, family, gamma, m, p)?;
        let masked: Vec<T> = base
            .iter()
            .zip(&radii)
            .map(|(&b, &r)| if r >= n { b } else { T::zero() })
            .collect();
        let tail = quadrature_values(grid, &masked)?.value.max(T::zero());
        let majorant = factor * tail.powf(p.recip());
        let passed = value.value <= majorant * (T::one() + opts.tol);
        entries.push(CutoffEntry {
            n,
            value,
            majorant,
            passed,
        });
    }
    let nonincreasing = entries
        .windows(2)
        .all(|w| w[1].value.value <= w[0].value.value * (T::one() + opts.tol));
    let last_below_tail_tol = entries
        .last()
        .is_none_or(|e| e.value.value <= opts.tail_tol);
    let passed = entries.iter().all(|e| e.passed);
    Ok(CutoffReport {
        leibniz_constant: a,
        entries,
        nonincreasing,
        last_below_tail_tol,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use statrs::function::erf::erfc;

    use super::*;
    use crate::funcspace::jet::Jet;
    use crate::funcspace::{JetSmooth, Mollifier};
    use crate::weights::{make_family, WeightKind};

    fn poly() -> DefiningFamily<f64> {
        make_family(WeightKind::Polynomial, &[], &[0.0, 2.0], 1).unwrap()
    }

    fn idx(v: f64) -> IndexLabel<f64> {
        IndexLabel::scalar(v)
    }

    #[test]
    fn compact_support_vanishes() {
        let g = Grid::line(-8.0, 8.0, 801).unwrap();
        let psi: SmoothRef<f64, f64> = Arc::new(Mollifier::new(1, 1.0).unwrap());
        let f = SampledFunction::from_smooth(g, psi).unwrap();
        let rep = cutoff_tail_norms(
            &f,
            &poly(),
            &idx(0.0),
            1,
            2.0,
            &[1.0, 2.0, 3.0],
            Default::default(),
        )
        .unwrap();
        for e in &rep.entries {
            assert_eq!(e.value.value, 0.0);
        }
        assert!(rep.passed && rep.nonincreasing);
    }

    #[test]
    fn gaussian_tail_against_erfc() {
        let g = Grid::line(-12.0, 12.0, 4801).unwrap();
        let f: SmoothRef<f64, f64> =
            Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| (-(&x[0] * &x[0])).exp()));
        let f = SampledFunction::from_smooth(g, f).unwrap();
        let ns = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rep =
            cutoff_tail_norms(&f, &poly(), &idx(0.0), 0, 1.0, &ns, Default::default()).unwrap();
        assert!(rep.passed);
        for w in rep.entries.windows(2) {
            assert!(w[1].value.value < w[0].value.value);
        }
        for e in &rep.entries {
            let oracle = std::f64::consts::PI.sqrt() * erfc(e.n);
            assert!(
                e.value.value <= oracle * (1.0 + 1e-6),
                "n={} {} vs {oracle}",
                e.n,
                e.value.value
            );
            let inner = std::f64::consts::PI.sqrt() * erfc(2.0 * e.n);
            assert!(e.value.value >= inner * (1.0 - 1e-6));
        }
        assert!(rep.last_below_tail_tol);
    }

    #[test]
    fn algebraic_tail_against_arctan() {
        let r = 60.0;
        let g = Grid::line(-r, r, 12001).unwrap();
        let f: SmoothRef<f64, f64> = Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| {
            (&x[0] * &x[0]).add_scalar(1.0).powf(-2.0)
        }));
        let f = SampledFunction::from_smooth(g, f).unwrap();
        let ns = [1.0, 2.0, 4.0, 8.0];
        let rep =
            cutoff_tail_norms(&f, &poly(), &idx(0.0), 0, 1.0, &ns, Default::default()).unwrap();
        assert!(rep.passed && rep.nonincreasing);
        // int_{n < |x| < R} (1+x^2)^{-2} dx
        let prim = |x: f64| x / (2.0 * (1.0 + x * x)) + x.atan() / 2.0;
        let tail = |n: f64| 2.0 * (prim(r) - prim(n));
        for e in &rep.entries {
            assert!(e.value.value <= tail(e.n) * (1.0 + 1e-6));
            assert!(e.value.value >= tail(2.0 * e.n) * (1.0 - 1e-6));
        }
    }

    #[test]
    fn ball_must_fit() {
        let g = Grid::line(-3.0, 3.0, 61).unwrap();
        let f = SampledFunction::from_fn(g, |x: &[f64]| (-x[0] * x[0]).exp()).unwrap();
        assert!(matches!(
            cutoff_tail_norms(
                &f,
                &poly(),
                &idx(0.0),
                0,
                1.0,
                &[1.0, 4.0],
                Default::default()
            ),
            Err(Error::OutsideBox(_))
        ));
    }

    #[test]
    fn leibniz_constant_is_modest() {
        let a0 = cutoff_derivative_sup::<f64>(1, 0).unwrap();
        assert_eq!(a0, 1.0);
        let a2 = cutoff_derivative_sup::<f64>(1, 2).unwrap();
        assert!(a2 > 1.0 && a2.is_finite());
    }
}
