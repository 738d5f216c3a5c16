//! Weighted sup and L^p seminorms of smooth and entire functions on grids.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{quadrature_values, DerivativePath, GridDescriptor, SampledFunction};
use crate::scalar::{FieldValue, Scalar};
use crate::weights::{DefiningFamily, IndexLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormKind {
    Sup,
    Lp,
    AnalyticSup,
    AnalyticLp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SeminormValue<T> {
    pub kind: SeminormKind,
    pub value: T,
    pub gamma: IndexLabel<T>,
    pub m: usize,
    pub p: Option<T>,
    pub grid: GridDescriptor,
    pub path: DerivativePath,
    /// Largest pointwise term on the outermost grid shell. For sup forms a
    /// value close to `value` means the maximum sits on the truncation boundary.
    pub boundary_max: T,
}

fn weights_for<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
) -> Result<Vec<T>> {
    if f.grid().dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: f.grid().dim(),
        });
    }
    family.weight(gamma)?.values_on(f.grid())
}

/// Pointwise terms and the resulting seminorm ingredients.
fn pointwise<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    term: impl Fn(T, &mut dyn Iterator<Item = T>) -> T + Sync,
) -> Result<(Vec<T>, T, DerivativePath)> {
    let w = weights_for(f, family, gamma)?;
    let (table, path) = f.derivative_table(m)?;
    let grid = f.grid();
    let terms: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|i| term(w[i], &mut table.iter().map(|col| col[i].modulus())))
        .collect();
    if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
        return Err(Error::NonFinite(format!(
            "seminorm integrand at {:?}",
            grid.point(i)
        )));
    }
    let boundary = (0..grid.len())
        .filter(|&i| grid.is_boundary(i))
        .fold(T::zero(), |a, i| a.max(terms[i]));
    Ok((terms, boundary, path))
}

/// `max_x max_{|mu| <= m} M_gamma(x) |d^mu f(x)|` over the grid.
pub fn sup_seminorm<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
) -> Result<SeminormValue<T>> {
    let (terms, boundary_max, path) = pointwise(f, family, gamma, m, |w, d| {
        let mx = d.fold(T::zero(), |a, b| a.max(b));
        if w.is_zero() {
            T::zero()
        } else {
            w * mx
        }
    })?;
    let value = terms.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(SeminormValue {
        kind: SeminormKind::Sup,
        value,
        gamma: gamma.clone(),
        m,
        p: None,
        grid: f.grid().descriptor(),
        path,
        boundary_max,
    })
}

/// `(int M_gamma^p sum_{|mu| <= m} |d^mu f|^p dx)^{1/p}` by grid quadrature.
pub fn lp_seminorm<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    p: T,
) -> Result<SeminormValue<T>> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidParams(
            "exponent p must be finite and >= 1".into(),
        ));
    }
    let (terms, boundary, path) = pointwise(f, family, gamma, m, |w, d| {
        let s = d.fold(T::zero(), |a, b| a + b.powf(p));
        if w.is_zero() {
            T::zero()
        } else {
            w.powf(p) * s
        }
    })?;
    let integral = quadrature_values(f.grid(), &terms)?.value;
    if !integral.is_finite() {
        return Err(Error::NonFinite("L^p seminorm quadrature".into()));
    }
    Ok(SeminormValue {
        kind: SeminormKind::Lp,
        value: integral.max(T::zero()).powf(p.recip()),
        gamma: gamma.clone(),
        m,
        p: Some(p),
        grid: f.grid().descriptor(),
        path,
        boundary_max: boundary.powf(p.recip()),
    })
}

fn require_analytic<T: Scalar, V: FieldValue<T>>(f: &SampledFunction<T, V>) -> Result<()> {
    if f.is_analytic() {
        Ok(())
    } else {
        Err(Error::NotAnalytic)
    }
}

/// `max_z M_gamma(z) |f(z)|` for an entire function sampled on `R^{2k}`.
pub fn analytic_sup_seminorm<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
) -> Result<SeminormValue<T>> {
    require_analytic(f)?;
    let mut s = sup_seminorm(f, family, gamma, 0)?;
    s.kind = SeminormKind::AnalyticSup;
    Ok(s)
}

/// `(int_{C^k} M_gamma^p |f|^p d lambda)^{1/p}` over the `R^{2k}` box.
pub fn analytic_lp_seminorm<T: Scalar, V: FieldValue<T>>(
    f: &SampledFunction<T, V>,
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    p: T,
) -> Result<SeminormValue<T>> {
    require_analytic(f)?;
    let mut s = lp_seminorm(f, family, gamma, 0, p)?;
    s.kind = SeminormKind::AnalyticLp;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use num_complex::Complex;

    use super::*;
    use crate::funcspace::jet::Jet;
    use crate::funcspace::{make_corpus, CorpusKind, Grid, JetSmooth, SmoothRef};
    use crate::weights::{make_family, WeightKind};

    fn idx(v: f64) -> IndexLabel<f64> {
        IndexLabel::scalar(v)
    }

    fn gauss(grid: Grid<f64>) -> SampledFunction<f64> {
        let f: SmoothRef<f64, f64> =
            Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| (-(&x[0] * &x[0])).exp()));
        SampledFunction::from_smooth(grid, f).unwrap()
    }

    fn poly() -> DefiningFamily<f64> {
        make_family(WeightKind::Polynomial, &[], &[0.0, 1.0, 2.0, 3.0, 4.0], 1).unwrap()
    }

    #[test]
    fn sup_examples() {
        let f = gauss(Grid::line(-8.0, 8.0, 1601).unwrap());
        let s = sup_seminorm(&f, &poly(), &idx(0.0), 0).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.boundary_max < 1e-20);
        let s = sup_seminorm(&f, &poly(), &idx(2.0), 0).unwrap();
        let x = (5.0_f64.sqrt() - 1.0) / 2.0;
        let exact = (1.0 + x).powi(2) * (-x * x).exp();
        assert!((s.value - exact).abs() < 1e-4 && s.value <= exact);
        assert!((s.value - 1.787).abs() < 1e-3);

        let ind = make_family(WeightKind::IndicatorBox, &[], &[1.0, 2.0], 1).unwrap();
        let g = Grid::line(-3.0, 3.0, 61).unwrap();
        let lin = SampledFunction::from_smooth(
            g,
            Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| x[0].clone())) as SmoothRef<f64, f64>,
        )
        .unwrap();
        assert_eq!(sup_seminorm(&lin, &ind, &idx(1.0), 1).unwrap().value, 1.0);
    }

    #[test]
    fn lp_examples() {
        let f = gauss(Grid::line(-8.0, 8.0, 1601).unwrap());
        let s = lp_seminorm(&f, &poly(), &idx(0.0), 0, 2.0).unwrap();
        assert!((s.value - (PI / 2.0).powf(0.25)).abs() < 1e-8);
        let s = lp_seminorm(&f, &poly(), &idx(0.0), 1, 2.0).unwrap();
        assert!((s.value - (2.0 * (PI / 2.0).sqrt()).sqrt()).abs() < 1e-8);
        let zero = f.scaled(0.0);
        assert_eq!(
            lp_seminorm(&zero, &poly(), &idx(0.0), 2, 3.0)
                .unwrap()
                .value,
            0.0
        );
        assert!(lp_seminorm(&f, &poly(), &idx(0.0), 0, 0.5).is_err());
    }

    fn entire(n: usize, grid: &Grid<f64>) -> Vec<SampledFunction<f64, Complex<f64>>> {
        make_corpus(CorpusKind::Entire, n, 1, grid)
            .unwrap()
            .into_complex()
            .unwrap()
    }

    #[test]
    fn analytic_examples() {
        let e = make_family(WeightKind::ExpTypeAnalytic, &[], &[1.0, 0.5], 1).unwrap();
        let g = Grid::cube(2, -10.0, 10.0, 201).unwrap();
        let c = entire(2, &g);
        assert_eq!(
            analytic_sup_seminorm(&c[0], &e, &idx(1.0)).unwrap().value,
            1.0
        );
        let s = analytic_sup_seminorm(&c[1], &e, &idx(1.0)).unwrap();
        assert!((s.value - (-1.0_f64).exp()).abs() < 1e-8);
        assert_eq!(
            analytic_sup_seminorm(&c[1].scaled(0.0), &e, &idx(1.0))
                .unwrap()
                .value,
            0.0
        );

        let g = Grid::cube(2, -30.0, 30.0, 1201).unwrap();
        let c = entire(2, &g);
        let one = analytic_lp_seminorm(&c[0], &e, &idx(1.0), 1.0)
            .unwrap()
            .value;
        assert!((one / (2.0 * PI) - 1.0).abs() < 1e-3, "{one}");
        let z = analytic_lp_seminorm(&c[1], &e, &idx(1.0), 1.0)
            .unwrap()
            .value;
        assert!((z / (4.0 * PI) - 1.0).abs() < 1e-3, "{z}");
    }

    #[test]
    fn analytic_flag_required() {
        let e = make_family(WeightKind::ExpTypeAnalytic, &[], &[1.0, 0.5], 1).unwrap();
        let g = Grid::cube(2, -1.0, 1.0, 11).unwrap();
        let f = SampledFunction::from_fn(g, |x| x[0]).unwrap();
        assert!(matches!(
            analytic_sup_seminorm(&f, &e, &idx(1.0)),
            Err(Error::NotAnalytic)
        ));
        assert!(matches!(
            analytic_lp_seminorm(&f, &e, &idx(1.0), 2.0),
            Err(Error::NotAnalytic)
        ));
    }

    #[test]
    fn json_record_fields() {
        let f = gauss(Grid::line(-8.0, 8.0, 161).unwrap());
        let s = sup_seminorm(&f, &poly(), &idx(1.0), 1).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        for key in ["value", "gamma", "m", "p", "grid", "path", "boundary_max"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["path"], "exact");
    }
}
