//! Truncated multivariate Taylor expansions ("jets").
//!
//! A jet of order `N` in `k` variables stores the Taylor coefficients
//! `c_mu = d^mu f(x) / mu!` for all `|mu| <= N`. Arithmetic on jets
//! propagates exact partial derivatives through smooth expressions, which is
//! how the mollifier, cutoff and corpus functions get exact derivative
//! evaluators.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use super::multiindex::{enumerate_multiindices, MultiIndex};
use crate::scalar::Scalar;

#[derive(Debug)]
pub struct JetLayout {
    dim: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(i, j, target)` with `indices[i] + indices[j] == indices[target]`.
    products: Vec<(usize, usize, usize)>,
    factorials: Vec<f64>,
}

impl JetLayout {
    fn build(dim: usize, order: usize) -> Self {
        let indices = enumerate_multiindices(dim, order);
        let lookup: HashMap<_, _> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.order() + b.order() <= order {
                    products.push((i, j, lookup[&(a + b)]));
                }
            }
        }
        let factorials = indices.iter().map(MultiIndex::factorial).collect();
        Self {
            dim,
            order,
            indices,
            lookup,
            products,
            factorials,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Multi-indices in coefficient order (same as `enumerate_multiindices`).
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, mu: &MultiIndex) -> Option<usize> {
        self.lookup.get(mu).copied()
    }
}

/// Shared, cached layout for `(dim, order)`.
pub fn layout(dim: usize, order: usize) -> Arc<JetLayout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet layout cache poisoned");
    guard
        .entry((dim, order))
        .or_insert_with(|| Arc::new(JetLayout::build(dim, order)))
        .clone()
}

#[derive(Clone, Debug)]
pub struct Jet<T> {
    layout: Arc<JetLayout>,
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    pub fn constant(layout: &Arc<JetLayout>, value: T) -> Self {
        let mut coeffs = vec![T::zero(); layout.indices.len()];
        coeffs[0] = value;
        Self {
            layout: layout.clone(),
            coeffs,
        }
    }

    /// The coordinate function `x_axis` expanded at `value`.
    pub fn variable(layout: &Arc<JetLayout>, axis: usize, value: T) -> Self {
        let mut jet = Self::constant(layout, value);
        if layout.order >= 1 {
            let unit = MultiIndex::axis(layout.dim, axis, 1);
            jet.coeffs[layout.lookup[&unit]] = T::one();
        }
        jet
    }

    /// Jets of all coordinate functions at `x`.
    pub fn variables(layout: &Arc<JetLayout>, x: &[T]) -> Vec<Self> {
        x.iter()
            .enumerate()
            .map(|(a, &v)| Self::variable(layout, a, v))
            .collect()
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    /// `d^mu f(x)`; zero when `|mu|` exceeds the jet order.
    pub fn derivative(&self, mu: &MultiIndex) -> T {
        match self.layout.position(mu) {
            Some(p) => self.coeffs[p] * T::lit(self.layout.factorials[p]),
            None => T::zero(),
        }
    }

    /// All derivatives in layout order.
    pub fn derivatives(&self) -> Vec<T> {
        self.coeffs
            .iter()
            .zip(&self.layout.factorials)
            .map(|(&c, &f)| c * T::lit(f))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(mut self, s: T) -> Self {
        for c in &mut self.coeffs {
            *c = *c * s;
        }
        self
    }

    pub fn add_scalar(mut self, s: T) -> Self {
        self.coeffs[0] = self.coeffs[0] + s;
        self
    }

    /// `f(self)` given `derivs[n] = f^(n)(self.value())` for `n <= order`.
    pub fn compose(&self, derivs: &[T]) -> Self {
        let order = self.layout.order;
        assert!(derivs.len() > order, "need derivatives up to the jet order");
        let mut delta = self.clone();
        delta.coeffs[0] = T::zero();
        let mut power = Self::constant(&self.layout, T::one());
        let mut out = Self::constant(&self.layout, T::zero());
        let mut fact = T::one();
        for (n, &d) in derivs.iter().enumerate().take(order + 1) {
            if n > 0 {
                fact = fact * T::from_count(n);
                power = &power * &delta;
            }
            let coef = d / fact;
            if !coef.is_zero() {
                for (o, &p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    *o = *o + coef * p;
                }
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.layout.order + 1])
    }

    pub fn recip(&self) -> Self {
        let u = self.value();
        let mut derivs = Vec::with_capacity(self.layout.order + 1);
        let mut d = u.recip();
        for n in 0..=self.layout.order {
            derivs.push(d);
            d = -d * T::from_count(n + 1) / u;
        }
        self.compose(&derivs)
    }

    /// `self^p` for real `p`; requires a positive value unless `p` is a
    /// nonnegative integer.
    pub fn powf(&self, p: T) -> Self {
        let u = self.value();
        let mut derivs = Vec::with_capacity(self.layout.order + 1);
        let mut coef = T::one();
        for n in 0..=self.layout.order {
            let e = p - T::from_count(n);
            derivs.push(if coef.is_zero() {
                T::zero()
            } else {
                coef * u.powf(e)
            });
            coef = coef * e;
        }
        self.compose(&derivs)
    }

    pub fn powi(&self, n: usize) -> Self {
        let mut out = Self::constant(&self.layout, T::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        self.powf(T::lit(0.5))
    }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        Jet {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        Jet {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        let mut coeffs = vec![T::zero(); self.coeffs.len()];
        for &(i, j, t) in &self.layout.products {
            coeffs[t] = coeffs[t] + self.coeffs[i] * rhs.coeffs[j];
        }
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(c: &[usize]) -> MultiIndex {
        MultiIndex::new(c.to_vec())
    }

    #[test]
    fn polynomial_derivatives() {
        let lay = layout(1, 4);
        let x = Jet::variable(&lay, 0, 2.0f64);
        let cube = x.powi(3);
        assert_eq!(cube.derivative(&mi(&[0])), 8.0);
        assert_eq!(cube.derivative(&mi(&[1])), 12.0);
        assert_eq!(cube.derivative(&mi(&[2])), 12.0);
        assert_eq!(cube.derivative(&mi(&[3])), 6.0);
        assert_eq!(cube.derivative(&mi(&[4])), 0.0);
    }

    #[test]
    fn exp_of_product_mixed_partial() {
        // f = exp(x*y); d_x d_y f = (1 + x y) exp(x y)
        let lay = layout(2, 2);
        let v = Jet::variables(&lay, &[0.5f64, -1.5]);
        let f = (&v[0] * &v[1]).exp();
        let xy: f64 = -0.75;
        assert!((f.derivative(&mi(&[1, 1])) - (1.0 + xy) * xy.exp()).abs() < 1e-14);
        assert!((f.derivative(&mi(&[2, 0])) - 1.5f64.powi(2) * xy.exp()).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_and_sqrt() {
        let lay = layout(1, 3);
        let x = Jet::variable(&lay, 0, 4.0f64);
        let r = x.recip();
        assert!((r.derivative(&mi(&[2])) - 2.0 / 64.0).abs() < 1e-15);
        let s = x.sqrt();
        assert!((s.derivative(&mi(&[1])) - 0.25).abs() < 1e-15);
        assert!((s.derivative(&mi(&[3])) - 3.0 / 8.0 * 4.0f64.powf(-2.5)).abs() < 1e-15);
    }
}
