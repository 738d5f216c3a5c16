use serde::Serialize;

use super::jet::{layout, Jet};
use super::multiindex::MultiIndex;
use super::sampled::Smooth;
use crate::error::{Error, Result};
use crate::scalar::{gamma_half_integer, Scalar};

/// `int_0^1 t^(k-1) exp(-1/(1-t^2)) dt` by composite Simpson on a fine mesh.
/// The integrand is flat at `t = 1`, so the rule converges very fast.
fn radial_profile_integral<T: Scalar>(k: usize) -> T {
    let n = 20_000usize;
    let h = T::one() / T::from_count(n);
    let mut acc = T::zero();
    for i in 0..=n {
        let t = T::from_count(i) * h;
        let v = if i == n {
            T::zero()
        } else {
            t.powi(k as i32 - 1) * (-(T::one() / (T::one() - t * t))).exp()
        };
        let w = if i == 0 || i == n {
            T::one()
        } else if i % 2 == 1 {
            T::lit(4.0)
        } else {
            T::lit(2.0)
        };
        acc = acc + w * v;
    }
    acc * h / T::lit(3.0)
}

/// Standard smooth bump `c * exp(-1/(1 - |x/rho|^2))`, normalized to unit mass
/// and supported in the closed `rho`-ball.
#[derive(Clone, Debug, Serialize)]
pub struct Mollifier<T> {
    dim: usize,
    radius: T,
    normalization: T,
}

impl<T: Scalar> Mollifier<T> {
    pub fn new(dim: usize, radius: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams(
                "mollifier dimension must be positive".into(),
            ));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mollifier radius {radius} must be positive"
            )));
        }
        // mass = |S^(k-1)| rho^k I_k with |S^(k-1)| = 2 pi^(k/2) / Gamma(k/2)
        let sphere = T::lit(2.0) * T::PI().powf(T::from_count(dim) / T::lit(2.0))
            / gamma_half_integer::<T>(dim);
        let mass = sphere * radius.powi(dim as i32) * radial_profile_integral::<T>(dim);
        Ok(Self {
            dim,
            radius,
            normalization: mass.recip(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// The constant `c`.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    pub fn value_at(&self, x: &[T]) -> T {
        let s = x
            .iter()
            .fold(T::zero(), |a, &v| a + (v / self.radius) * (v / self.radius));
        if s >= T::one() {
            return T::zero();
        }
        self.normalization * (-(T::one() / (T::one() - s))).exp()
    }

    fn jet(&self, order: usize, x: &[T]) -> Jet<T> {
        let lay = layout(self.dim, order);
        let vars = Jet::variables(&lay, x);
        let zero = Jet::constant(&lay, T::zero());
        let s = vars.iter().fold(zero.clone(), |acc, v| {
            let u = v.clone().scale(self.radius.recip());
            &acc + &(&u * &u)
        });
        let t = (-s).add_scalar(T::one());
        if t.value() <= T::zero() || (-(t.value().recip())).exp().is_zero() {
            return zero;
        }
        (-t.recip()).exp().scale(self.normalization)
    }
}

impl<T: Scalar> Smooth<T, T> for Mollifier<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> T {
        if mu.is_zero() {
            return self.value_at(x);
        }
        self.jet(mu.order(), x).derivative(mu)
    }

    fn derivatives_upto(&self, order: usize, x: &[T]) -> Vec<T> {
        self.jet(order, x).derivatives()
    }
}

/// `g(u) = exp(-1/u)` for `u > 0`, else zero (as a jet).
fn flat_profile<T: Scalar>(u: &Jet<T>) -> Jet<T> {
    if u.value() <= T::zero() || (-(u.value().recip())).exp().is_zero() {
        return Jet::constant(u.layout(), T::zero());
    }
    (-u.recip()).exp()
}

/// Radial smooth step `phi(x/scale)`: equal to 1 for `|x| <= scale`, 0 for
/// `|x| >= 2 scale`, built from the same `exp(-1/u)` profile as the mollifier.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothStep<T> {
    dim: usize,
    scale: T,
}

impl<T: Scalar> SmoothStep<T> {
    pub fn new(dim: usize, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::InvalidParams("cutoff scale must be positive".into()));
        }
        Ok(Self { dim, scale })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    fn jet(&self, order: usize, x: &[T]) -> Jet<T> {
        let lay = layout(self.dim, order);
        let r2 = x
            .iter()
            .fold(T::zero(), |a, &v| a + (v / self.scale) * (v / self.scale));
        if r2 <= T::one() {
            return Jet::constant(&lay, T::one());
        }
        if r2 >= T::lit(4.0) {
            return Jet::constant(&lay, T::zero());
        }
        let vars = Jet::variables(&lay, x);
        let s = vars.iter().fold(Jet::constant(&lay, T::zero()), |acc, v| {
            let u = v.clone().scale(self.scale.recip());
            &acc + &(&u * &u)
        });
        let t = s.sqrt();
        let a = flat_profile(&(-t.clone()).add_scalar(T::lit(2.0)));
        let b = flat_profile(&t.add_scalar(-T::one()));
        &a * &(&a + &b).recip()
    }
}

impl<T: Scalar> Smooth<T, T> for SmoothStep<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> T {
        self.jet(mu.order(), x).derivative(mu)
    }
    fn derivatives_upto(&self, order: usize, x: &[T]) -> Vec<T> {
        self.jet(order, x).derivatives()
    }
}

/// `1 - phi(x/n)`: vanishes on the `n`-ball.
#[derive(Clone, Debug, Serialize)]
pub struct TailCutoff<T> {
    step: SmoothStep<T>,
}

impl<T: Scalar> TailCutoff<T> {
    pub fn new(dim: usize, n: T) -> Result<Self> {
        Ok(Self {
            step: SmoothStep::new(dim, n)?,
        })
    }
}

impl<T: Scalar> Smooth<T, T> for TailCutoff<T> {
    fn dim(&self) -> usize {
        self.step.dim
    }
    fn derivative(&self, mu: &MultiIndex, x: &[T]) -> T {
        let d = self.step.derivative(mu, x);
        if mu.is_zero() {
            T::one() - d
        } else {
            -d
        }
    }
}
