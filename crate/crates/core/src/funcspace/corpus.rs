//! Built-in test-function corpora, all with exact derivative evaluators.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::jet::Jet;
use super::mollifier::Mollifier;
use super::multiindex::{enumerate_multiindices, MultiIndex};
use super::sampled::{JetSmooth, SampledFunction, Smooth, SmoothRef};
use crate::error::{Error, Result};
use crate::scalar::{FieldValue, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    Hermite,
    Bump,
    PolynomialTimesGaussian,
    Entire,
}

/// Real corpora live on `R^k`; the entire corpus on `C^k` sampled as `R^{2k}`.
#[derive(Clone, Debug)]
pub enum Corpus<T: Scalar> {
    Real(Vec<SampledFunction<T>>),
    Complex(Vec<SampledFunction<T, Complex<T>>>),
}

impl<T: Scalar> Corpus<T> {
    pub fn len(&self) -> usize {
        match self {
            Corpus::Real(v) => v.len(),
            Corpus::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_real(self) -> Result<Vec<SampledFunction<T>>> {
        match self {
            Corpus::Real(v) => Ok(v),
            Corpus::Complex(_) => Err(Error::InvalidParams("corpus is complex-valued".into())),
        }
    }

    pub fn into_complex(self) -> Result<Vec<SampledFunction<T, Complex<T>>>> {
        match self {
            Corpus::Complex(v) => Ok(v),
            Corpus::Real(_) => Err(Error::InvalidParams("corpus is real-valued".into())),
        }
    }
}

/// Builds `n` corpus functions on `grid`. `k` is the real dimension for the
/// real corpora and the complex dimension for `Entire` (grid dimension `2k`).
pub fn make_corpus<T: Scalar>(
    kind: CorpusKind,
    n: usize,
    k: usize,
    grid: &Grid<T>,
) -> Result<Corpus<T>> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParams(
            "corpus needs n >= 1 and k >= 1".into(),
        ));
    }
    let expected = if kind == CorpusKind::Entire { 2 * k } else { k };
    if grid.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: grid.dim(),
        });
    }
    match kind {
        CorpusKind::Hermite => {
            let degrees = first_multiindices(k, n);
            degrees
                .into_iter()
                .map(|d| {
                    let label = format!("hermite{d}");
                    let f: SmoothRef<T, T> = Arc::new(HermiteFunction { degrees: d });
                    Ok(SampledFunction::from_smooth(grid.clone(), f)?.with_label(label))
                })
                .collect::<Result<_>>()
                .map(Corpus::Real)
        }
        CorpusKind::Bump => (0..n)
            .map(|i| {
                let r = T::one() + T::from_count(i) / T::lit(2.0);
                let f: SmoothRef<T, T> = Arc::new(Mollifier::new(k, r)?);
                Ok(SampledFunction::from_smooth(grid.clone(), f)?
                    .with_label(format!("bump(r={r})")))
            })
            .collect::<Result<_>>()
            .map(Corpus::Real),
        CorpusKind::PolynomialTimesGaussian => first_multiindices(k, n)
            .into_iter()
            .map(|alpha| {
                let label = format!("x^{alpha}*gauss");
                let f: SmoothRef<T, T> = Arc::new(poly_gauss::<T>(alpha));
                Ok(SampledFunction::from_smooth(grid.clone(), f)?.with_label(label))
            })
            .collect::<Result<_>>()
            .map(Corpus::Real),
        CorpusKind::Entire => {
            if k > 2 {
                return Err(Error::InvalidParams(format!(
                    "entire corpus supports complex dimension 1 or 2, got {k}"
                )));
            }
            let mut terms: Vec<EntireTerm> = enumerate_multiindices(k, 6)
                .into_iter()
                .map(EntireTerm::Monomial)
                .collect();
            let q = 0.25;
            terms.extend(
                [(q, 0.0), (-q, 0.0), (0.0, q), (0.0, -q)]
                    .into_iter()
                    .map(|(re, im)| EntireTerm::Exponential(Complex::new(re, im))),
            );
            if n > terms.len() {
                return Err(Error::InvalidParams(format!(
                    "entire corpus has {} members for k = {k}, requested {n}",
                    terms.len()
                )));
            }
            terms
                .into_iter()
                .take(n)
                .map(|term| {
                    let label = term.to_string();
                    let f: SmoothRef<T, Complex<T>> = Arc::new(EntireFunction { k, term });
                    Ok(SampledFunction::from_smooth(grid.clone(), f)?
                        .with_analytic(true)
                        .with_label(label))
                })
                .collect::<Result<_>>()
                .map(Corpus::Complex)
        }
    }
}

fn first_multiindices(k: usize, n: usize) -> Vec<MultiIndex> {
    let mut m = 0;
    loop {
        let all = enumerate_multiindices(k, m);
        if all.len() >= n {
            return all.into_iter().take(n).collect();
        }
        m += 1;
    }
}

fn poly_gauss<T: Scalar>(
    alpha: MultiIndex,
) -> JetSmooth<impl Fn(&[Jet<T>]) -> Jet<T> + Send + Sync> {
    let dim = alpha.dim();
    JetSmooth::new(dim, move |x: &[Jet<T>]| {
        let lay = x[0].layout().clone();
        let mut sq = Jet::constant(&lay, T::zero());
        let mut mono = Jet::constant(&lay, T::one());
        for (xa, &p) in x.iter().zip(alpha.components()) {
            sq = &sq + &(xa * xa);
            if p > 0 {
                mono = &mono * &xa.powi(p);
            }
        }
        &mono * &(-sq).exp()
    })
}

/// Normalized Hermite functions `h_0..=h_n` at `x`, by the stable three-term
/// recurrence.
pub fn hermite_functions<T: Scalar>(n: usize, x: T) -> Vec<T> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(T::PI().powf(T::lit(-0.25)) * (-x * x / T::lit(2.0)).exp());
    if n >= 1 {
        h.push(T::lit(2.0).sqrt() * x * h[0]);
    }
    for j in 1..n {
        let jf = T::from_count(j);
        let next = (T::lit(2.0) / (jf + T::one())).sqrt() * x * h[j]
            - (jf / (jf + T::one())).sqrt() * h[j - 1];
        h.push(next);
    }
    h
}

/// `d^order h_n / dx^order` via `h_j' = sqrt(j/2) h_{j-1} - sqrt((j+1)/2) h_{j+1}`.
pub fn hermite_derivative<T: Scalar>(n: usize, order: usize, x: T) -> T {
    let top = n + order;
    let mut c = vec![T::zero(); top + 2];
    c[n] = T::one();
    for _ in 0..order {
        let mut next = vec![T::zero(); top + 2];
        for j in 0..=top {
            if c[j].is_zero() {
                continue;
            }
            let jf = T::from_count(j);
            if j > 0 {
                next[j - 1] = next[j - 1] + (jf / T::lit(2.0)).sqrt() * c[j];
            }
            next[j + 1] = next[j + 1] - ((jf + T::one()) / T::lit(2.0)).sqrt() * c[j];
        }
        c = next;
    }
    let h = hermite_functions(top, x);
    h.iter().zip(&c).map(|(&hv, &cv)| hv * cv).sum()
}

/// Tensor-product Hermite function `prod_a h_{n_a}(x_a)`.
#[derive(Clone, Debug)]
pub struct HermiteFunction {
    pub degrees: MultiIndex,
}

impl<T: Scalar> Smooth<T, T> for HermiteFunction {
    fn dim(&self) -> usize {
        self.degrees.dim()
    }

    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> T {
        self.degrees
            .components()
            .iter()
            .zip(mu.components())
            .zip(x)
            .map(|((&n, &d), &xa)| hermite_derivative(n, d, xa))
            .fold(T::one(), |a, b| a * b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EntireTerm {
    /// `z^alpha`.
    Monomial(MultiIndex),
    /// `exp(c * (z_1 + ... + z_k))`.
    Exponential(Complex<f64>),
}

impl std::fmt::Display for EntireTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntireTerm::Monomial(a) => write!(f, "z^{a}"),
            EntireTerm::Exponential(c) => write!(f, "exp(({}{:+}i)*sum(z))", c.re, c.im),
        }
    }
}

/// Entire function on `C^k`, evaluated on `R^{2k}` with axes
/// `(Re z_1, Im z_1, Re z_2, ...)`.
#[derive(Clone, Debug)]
pub struct EntireFunction {
    pub k: usize,
    pub term: EntireTerm,
}

impl EntireFunction {
    /// Complex derivative `d^beta f / dz^beta` at `z`.
    pub fn complex_derivative<T: Scalar>(&self, beta: &[usize], z: &[Complex<T>]) -> Complex<T> {
        match &self.term {
            EntireTerm::Monomial(alpha) => {
                let mut acc = Complex::new(T::one(), T::zero());
                for ((&a, &b), &zj) in alpha.components().iter().zip(beta).zip(z) {
                    if b > a {
                        return Complex::new(T::zero(), T::zero());
                    }
                    let falling = ((a - b + 1)..=a).fold(T::one(), |p, i| p * T::from_count(i));
                    acc = acc * zj.powu((a - b) as u32) * falling;
                }
                acc
            }
            EntireTerm::Exponential(c) => {
                let c = Complex::new(T::lit(c.re), T::lit(c.im));
                let s = z
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
                let order: usize = beta.iter().sum();
                c.powu(order as u32) * (c * s).exp()
            }
        }
    }
}

impl<T: Scalar> Smooth<T, Complex<T>> for EntireFunction {
    fn dim(&self) -> usize {
        2 * self.k
    }

    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> Complex<T> {
        let m = mu.components();
        let z: Vec<Complex<T>> = (0..self.k)
            .map(|j| Complex::new(x[2 * j], x[2 * j + 1]))
            .collect();
        let beta: Vec<usize> = (0..self.k).map(|j| m[2 * j] + m[2 * j + 1]).collect();
        let ipow: usize = (0..self.k).map(|j| m[2 * j + 1]).sum();
        self.complex_derivative(&beta, &z).times_i_pow(ipow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::sampled::cauchy_riemann_residual;

    #[test]
    fn hermite_closed_forms() {
        let c = std::f64::consts::PI.powf(-0.25);
        for &x in &[-2.5, -0.3, 0.0, 1.1, 3.0] {
            let g = (-x * x / 2.0_f64).exp();
            let h = hermite_functions(2, x);
            assert!((h[0] - c * g).abs() < 1e-15);
            // H_1 = 2x, norm sqrt(2 sqrt(pi)); H_2 = 4x^2 - 2, norm sqrt(8 sqrt(pi))
            assert!((h[1] - c * 2.0 * x * g / 2.0_f64.sqrt()).abs() < 1e-14);
            assert!((h[2] - c * (4.0 * x * x - 2.0) * g / 8.0_f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_orthonormal() {
        let g = Grid::line(-12.0_f64, 12.0, 2401).unwrap();
        let vals: Vec<Vec<f64>> = g
            .points()
            .iter()
            .map(|x| hermite_functions(6, x[0]))
            .collect();
        let w = g.quadrature_weights();
        for i in 0..=6 {
            for j in 0..=6 {
                let ip: f64 = vals.iter().zip(&w).map(|(v, &wq)| v[i] * v[j] * wq).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10, "<h{i},h{j}> = {ip}");
            }
        }
    }

    #[test]
    fn hermite_derivative_matches_difference_quotient() {
        for n in 0..5 {
            for d in 1..3 {
                let x = 0.7_f64;
                let eps = 1e-5;
                let fd = (hermite_derivative(n, d - 1, x + eps)
                    - hermite_derivative(n, d - 1, x - eps))
                    / (2.0 * eps);
                assert!((fd - hermite_derivative(n, d, x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn corpus_shapes() {
        let g = Grid::line(-6.0_f64, 6.0, 121).unwrap();
        let c = make_corpus(CorpusKind::Hermite, 3, 1, &g)
            .unwrap()
            .into_real()
            .unwrap();
        assert_eq!(c.len(), 3);
        let bump = make_corpus(CorpusKind::Bump, 1, 1, &g)
            .unwrap()
            .into_real()
            .unwrap();
        let m = Mollifier::new(1, 1.0).unwrap();
        for (x, v) in g.points().iter().zip(bump[0].values()) {
            assert_eq!(*v, m.value_at(x));
        }
        let pg = make_corpus(CorpusKind::PolynomialTimesGaussian, 2, 1, &g)
            .unwrap()
            .into_real()
            .unwrap();
        let x = [0.5];
        assert!((pg[1].evaluate(&x).unwrap() - 0.5 * (-0.25_f64).exp()).abs() < 1e-15);
        assert!(make_corpus(CorpusKind::Entire, 2, 1, &g).is_err());
    }

    #[test]
    fn entire_corpus_is_analytic() {
        let g = Grid::cube(2, -2.0_f64, 2.0, 81).unwrap();
        let c = make_corpus(CorpusKind::Entire, 11, 1, &g)
            .unwrap()
            .into_complex()
            .unwrap();
        assert_eq!(c[0].values()[0], Complex::new(1.0, 0.0));
        let z = Complex::new(0.5, -1.5);
        assert!((c[1].evaluate(&[0.5, -1.5]).unwrap() - z).norm() < 1e-15);
        for f in &c {
            assert!(f.is_analytic());
            assert!(cauchy_riemann_residual(f).unwrap() < 1e-2, "{}", f.label());
            // exact partials satisfy d/dy = i d/dx
            let dx = f
                .exact()
                .unwrap()
                .derivative(&MultiIndex::new(vec![1, 0]), &[0.3, 0.4]);
            let dy = f
                .exact()
                .unwrap()
                .derivative(&MultiIndex::new(vec![0, 1]), &[0.3, 0.4]);
            assert!((dy - dx * Complex::new(0.0, 1.0)).norm() < 1e-13);
        }
    }
}
