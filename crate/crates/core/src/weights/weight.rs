use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};
use crate::funcspace::Grid;
use crate::scalar::{euclidean_norm, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    IndicatorBox,
    Polynomial,
    GelfandShilovExp,
    ExpTypeAnalytic,
    Custom,
    Tensor,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::IndicatorBox => "indicator-box",
            Self::Polynomial => "polynomial",
            Self::GelfandShilovExp => "gelfand-shilov-exp",
            Self::ExpTypeAnalytic => "exp-type-analytic",
            Self::Custom => "custom",
            Self::Tensor => "tensor",
        })
    }
}

impl std::str::FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::UnknownKind(s.to_string()))
    }
}

/// Family index. Built-in families use one real component (`l`, `n`, `A'`
/// or `a`); tensor families concatenate the components of both factors.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct IndexLabel<T>(pub Vec<T>);

impl<T: Scalar> IndexLabel<T> {
    pub fn scalar(v: T) -> Self {
        Self(vec![v])
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }

    /// The single component of a built-in index.
    pub fn value(&self) -> T {
        self.0[0]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64_lossy()).collect()
    }
}

impl<T: Scalar> fmt::Display for IndexLabel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(", "))
        }
    }
}

impl<T: Scalar> Serialize for IndexLabel<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.len() == 1 {
            self.0[0].serialize(s)
        } else {
            self.0.serialize(s)
        }
    }
}

impl<'de, T: Scalar> Deserialize<'de> for IndexLabel<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            One(T),
            Many(Vec<T>),
        }
        Ok(match Raw::<T>::deserialize(d)? {
            Raw::One(v) => Self(vec![v]),
            Raw::Many(v) => Self(v),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Shape<T> {
    Constant(T),
    /// `1` on the box `[-n, n]^k`, `0` outside.
    IndicatorBox(T),
    /// `(1 + |x|)^l`.
    Polynomial(T),
    /// `exp(sum_i c_i |x|^{p_i})`.
    ExpRadial(Vec<(T, T)>),
    /// Expression in `x0..`, with `g` bound to the index value.
    Expression {
        expr: Arc<Expr>,
        index: Option<T>,
    },
    /// `left(x[..k1]) * right(x[k1..])`.
    Tensor(Arc<WeightFunction<T>>, Arc<WeightFunction<T>>),
}

/// Nonnegative weight on `R^k`.
#[derive(Clone, Debug)]
pub struct WeightFunction<T> {
    dim: usize,
    kind: WeightKind,
    params: Vec<T>,
    shape: Shape<T>,
}

impl<T: Scalar> WeightFunction<T> {
    pub fn new(dim: usize, kind: WeightKind, params: Vec<T>, shape: Shape<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams(
                "weight dimension must be positive".into(),
            ));
        }
        match &shape {
            Shape::Expression { expr, .. } => expr.check_dims(dim, 0)?,
            Shape::Tensor(a, b) if a.dim + b.dim != dim => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.dim + b.dim,
                })
            }
            _ => {}
        }
        Ok(Self {
            dim,
            kind,
            params,
            shape,
        })
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self {
            dim,
            kind: WeightKind::Custom,
            params: vec![c],
            shape: Shape::Constant(c),
        }
    }

    pub fn indicator_box(dim: usize, half_width: T) -> Self {
        Self {
            dim,
            kind: WeightKind::IndicatorBox,
            params: vec![half_width],
            shape: Shape::IndicatorBox(half_width),
        }
    }

    pub fn polynomial(dim: usize, exponent: T) -> Self {
        Self {
            dim,
            kind: WeightKind::Polynomial,
            params: vec![exponent],
            shape: Shape::Polynomial(exponent),
        }
    }

    pub fn exp_radial(dim: usize, kind: WeightKind, params: Vec<T>, terms: Vec<(T, T)>) -> Self {
        Self {
            dim,
            kind,
            params,
            shape: Shape::ExpRadial(terms),
        }
    }

    pub fn expression(dim: usize, expr: Arc<Expr>, index: Option<T>) -> Result<Self> {
        let params = index.into_iter().collect();
        Self::new(
            dim,
            WeightKind::Custom,
            params,
            Shape::Expression { expr, index },
        )
    }

    pub fn tensor(left: Arc<Self>, right: Arc<Self>) -> Self {
        let params = left.params.iter().chain(&right.params).copied().collect();
        Self {
            dim: left.dim + right.dim,
            kind: WeightKind::Tensor,
            params,
            shape: Shape::Tensor(left, right),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    /// True when the weight may vanish (indicator factors).
    pub fn has_zeros(&self) -> bool {
        match &self.shape {
            Shape::IndicatorBox(_) | Shape::Expression { .. } => true,
            Shape::Constant(c) => c.is_zero(),
            Shape::Tensor(a, b) => a.has_zeros() || b.has_zeros(),
            _ => false,
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        match &self.shape {
            Shape::Constant(c) => *c,
            Shape::IndicatorBox(n) => {
                if x.iter().all(|v| v.abs() <= *n) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Shape::Polynomial(l) => {
                let base = T::one() + euclidean_norm(x);
                if l.fract().is_zero() && l.abs() < T::lit(1024.0) {
                    base.powi(l.to_i32().unwrap_or(0))
                } else {
                    base.powf(*l)
                }
            }
            Shape::ExpRadial(terms) => {
                let r = euclidean_norm(x);
                let e = terms
                    .iter()
                    .fold(T::zero(), |acc, &(c, p)| acc + c * r.powf(p));
                e.exp()
            }
            Shape::Expression { expr, index } => expr.eval(&Bindings {
                x,
                y: &[],
                index: *index,
            }),
            Shape::Tensor(a, b) => {
                let (xa, xb) = x.split_at(a.dim);
                a.eval(xa) * b.eval(xb)
            }
        }
    }

    /// Values at every grid point, in flat grid order.
    pub fn values_on(&self, grid: &Grid<T>) -> Result<Vec<T>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: grid.dim(),
            });
        }
        let values: Vec<T> = (0..grid.len())
            .into_par_iter()
            .map_init(
                || vec![T::zero(); self.dim],
                |buf, i| {
                    grid.point_into(i, buf);
                    self.eval(buf)
                },
            )
            .collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::NonFinite(format!(
                "weight value {} at {:?} (weights must be finite and nonnegative)",
                values[i],
                grid.point(i)
            )));
        }
        Ok(values)
    }
}
