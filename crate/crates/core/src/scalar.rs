//! Scalar abstractions shared by every module.
//!
//! All numerics are generic over [`Scalar`], implemented for `f32` and
//! `f64`. Function values are generic over [`FieldValue`], which covers the
//! real scalar itself and `Complex<T>` for entire functions.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar used throughout the crate.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + FieldValue<Self>
    + 'static
{
    /// Converts an `f64` literal. Panics only if the literal is not
    /// representable, which never happens for finite `f64` -> `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Values a sampled function can take: a real scalar or a complex number.
pub trait FieldValue<T>:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Mul<T, Output = Self>
    + Serialize
    + 'static
{
    /// Absolute value (complex modulus).
    fn modulus(self) -> T;
    fn from_real(v: T) -> Self;
    fn is_finite_value(self) -> bool;
    /// Multiplication by `i^power`; real values only accept even powers.
    fn times_i_pow(self, power: usize) -> Self;
}

macro_rules! real_value {
    ($t:ty) => {
        impl FieldValue<$t> for $t {
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn from_real(v: $t) -> Self {
                v
            }
            #[inline]
            fn is_finite_value(self) -> bool {
                self.is_finite()
            }
            fn times_i_pow(self, power: usize) -> Self {
                match power % 4 {
                    0 => self,
                    2 => -self,
                    _ => panic!("odd power of i applied to a real value"),
                }
            }
        }
    };
}

impl<T: Scalar> FieldValue<T> for Complex<T> {
    #[inline]
    fn modulus(self) -> T {
        self.re.hypot(self.im)
    }
    #[inline]
    fn from_real(v: T) -> Self {
        Complex::new(v, T::zero())
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn times_i_pow(self, power: usize) -> Self {
        match power % 4 {
            0 => self,
            1 => Complex::new(-self.im, self.re),
            2 => -self,
            _ => Complex::new(self.im, -self.re),
        }
    }
}

real_value!(f32);
real_value!(f64);

/// Euclidean norm of a point.
#[inline]
pub fn euclidean_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i))
}

/// Binomial coefficient computed in `u128`; saturates on overflow.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Gamma function at half-integers `n / 2`, `n >= 1`.
pub fn gamma_half_integer<T: Scalar>(n: usize) -> T {
    assert!(n >= 1);
    let half = T::lit(0.5);
    let (mut value, mut arg) = if n.is_multiple_of(2) {
        (T::one(), T::one())
    } else {
        (T::PI().sqrt(), half)
    };
    let target = T::from_count(n) * half;
    while arg < target {
        value = value * arg;
        arg = arg + T::one();
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn gamma_at_half_integers() {
        assert!((gamma_half_integer::<f64>(1) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer::<f64>(2), 1.0);
        assert!((gamma_half_integer::<f64>(3) - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer::<f64>(6), 2.0);
    }

    #[test]
    fn powers_of_i() {
        let z = Complex::new(1.0f64, 2.0);
        assert_eq!(z.times_i_pow(1), z * Complex::new(0.0, 1.0));
        assert_eq!(z.times_i_pow(3), z * Complex::new(0.0, -1.0));
        assert_eq!(2.0f64.times_i_pow(2), -2.0);
    }
}
