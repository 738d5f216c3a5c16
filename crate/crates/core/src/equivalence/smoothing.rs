//! Mollified weights `M~(x) = int M_g'(x + x') psi(x') dx'`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::tally::{fmt_point, InequalityTally};
use crate::error::{Error, Result};
use crate::funcspace::{enumerate_multiindices, Grid, Mollifier, MultiIndex, Smooth};
use crate::scalar::Scalar;
use crate::weights::{DefiningFamily, IndexLabel, WeightFunction};

/// Two condition (II) steps `g -> g' -> g''` with the common constant
/// `C = max(C1, C2)` and radius `rho = min(rho1, rho2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SmoothingChain<T> {
    pub gamma: IndexLabel<T>,
    pub gamma_prime: IndexLabel<T>,
    pub gamma_double_prime: IndexLabel<T>,
    pub constant: T,
    pub radius: T,
    /// Some step maps an index to itself.
    pub degenerate: bool,
}

impl<T: Scalar> SmoothingChain<T> {
    pub fn resolve(family: &DefiningFamily<T>, gamma: &IndexLabel<T>) -> Result<Self> {
        let w1 = family.cond_ii(gamma)?;
        let w2 = family.cond_ii(&w1.target)?;
        Ok(Self {
            gamma: gamma.clone(),
            gamma_prime: w1.target.clone(),
            gamma_double_prime: w2.target.clone(),
            constant: w1.constant.max(w2.constant),
            radius: w1.radius.min(w2.radius),
            degenerate: w1.target == *gamma || w2.target == w1.target,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingOptions<T> {
    /// Lattice nodes per mollifier radius along each axis.
    pub nodes_per_radius: usize,
    pub tol: T,
}

impl<T: Scalar> Default for SmoothingOptions<T> {
    fn default() -> Self {
        Self {
            nodes_per_radius: 16,
            tol: T::lit(1e-9),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct MollifierDescriptor<T> {
    pub dim: usize,
    pub radius: T,
    pub normalization: T,
    pub nodes: usize,
    /// Lattice sum of `psi`; the convolution is divided by it.
    pub discrete_mass: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct DerivativeConstant<T> {
    pub mu: Vec<usize>,
    pub value: T,
}

/// `M~` built from `M_g'` where `g'` is the condition (II) target of `g`.
///
/// The integral is a lattice sum over the open mollifier ball, normalized by
/// the lattice mass, so `M_g <= C M~` and `|d^mu M~| <= C_mu M_g''` hold
/// node by node whenever the witnesses do.
#[derive(Clone, Debug)]
pub struct SmoothedWeight<T> {
    chain: SmoothingChain<T>,
    source: Arc<WeightFunction<T>>,
    mollifier: Mollifier<T>,
    offsets: Vec<Vec<T>>,
    multiindices: Vec<MultiIndex>,
    /// `kernels[a][j] = (-1)^{|mu_a|} d^{mu_a} psi(x'_j) / mass`.
    kernels: Vec<Vec<T>>,
    c_mu: Vec<T>,
    discrete_mass: T,
    checks: Vec<InequalityTally>,
}

impl<T: Scalar> SmoothedWeight<T> {
    pub fn chain(&self) -> &SmoothingChain<T> {
        &self.chain
    }

    pub fn source_index(&self) -> &IndexLabel<T> {
        &self.chain.gamma_prime
    }

    pub fn mollifier(&self) -> &Mollifier<T> {
        &self.mollifier
    }

    pub fn descriptor(&self) -> MollifierDescriptor<T> {
        MollifierDescriptor {
            dim: self.mollifier.dim(),
            radius: self.mollifier.radius(),
            normalization: self.mollifier.normalization(),
            nodes: self.offsets.len(),
            discrete_mass: self.discrete_mass,
        }
    }

    /// `C_mu = C * int |d^mu psi|` for `|mu| <= k`.
    pub fn derivative_constants(&self) -> Vec<DerivativeConstant<T>> {
        self.multiindices
            .iter()
            .zip(&self.c_mu)
            .map(|(mu, &value)| DerivativeConstant {
                mu: mu.components().to_vec(),
                value,
            })
            .collect()
    }

    /// `C * sum_{|mu| <= k} C_mu`.
    pub fn c_prime(&self) -> T {
        self.chain.constant * self.c_mu.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Grid verification of the lower bound and the derivative bounds.
    pub fn checks(&self) -> &[InequalityTally] {
        &self.checks
    }

    fn source_at_nodes(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        self.offsets
            .iter()
            .map(|o| {
                for ((yi, &xi), &oi) in y.iter_mut().zip(x).zip(o) {
                    *yi = xi + oi;
                }
                self.source.eval(&y)
            })
            .collect()
    }

    fn dot(kernel: &[T], vals: &[T]) -> T {
        kernel.iter().zip(vals).fold(
            T::zero(),
            |a, (&k, &v)| if v.is_zero() { a } else { a + k * v },
        )
    }

    pub fn value(&self, x: &[T]) -> T {
        Self::dot(&self.kernels[0], &self.source_at_nodes(x))
    }

    /// `d^mu M~(x)` for `|mu| <= k`.
    pub fn derivative(&self, mu: &MultiIndex) -> Option<impl Fn(&[T]) -> T + '_> {
        let a = self.multiindices.iter().position(|m| m == mu)?;
        Some(move |x: &[T]| Self::dot(&self.kernels[a], &self.source_at_nodes(x)))
    }

    /// All `d^mu M~(x)`, `|mu| <= k`, in `enumerate_multiindices` order.
    pub fn derivatives(&self, x: &[T]) -> Vec<T> {
        let vals = self.source_at_nodes(x);
        self.kernels.iter().map(|k| Self::dot(k, &vals)).collect()
    }

    pub fn values_on(&self, grid: &Grid<T>) -> Vec<T> {
        (0..grid.len())
            .into_par_iter()
            .map(|i| self.value(&grid.point(i)))
            .collect()
    }
}

fn lattice<T: Scalar>(k: usize, radius: T, n: usize) -> Vec<Vec<T>> {
    let side = 2 * n + 1;
    let h = radius / T::from_count(n);
    let total = side.pow(k as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut p = vec![T::zero(); k];
        for c in p.iter_mut().rev() {
            let i = rem % side;
            rem /= side;
            *c = h * (T::from_count(i) - T::from_count(n));
        }
        let r2 = p.iter().fold(T::zero(), |a, &v| a + v * v);
        if r2 < radius * radius {
            out.push(p);
        }
    }
    out
}

/// Smooths the condition (II) target `g'` of `gamma` with `psi` and verifies
/// `M_gamma <= C M~` and `|d^mu M~| <= C_mu M_g''` (`|mu| <= k`) on `grid`.
pub fn smooth_weight<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    psi: &Mollifier<T>,
    grid: &Grid<T>,
    opts: SmoothingOptions<T>,
) -> Result<SmoothedWeight<T>> {
    let k = family.dim();
    if psi.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: psi.dim(),
        });
    }
    if grid.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: grid.dim(),
        });
    }
    if opts.nodes_per_radius < 2 {
        return Err(Error::InvalidParams(
            "mollifier lattice needs at least 2 nodes per radius".into(),
        ));
    }
    let chain = SmoothingChain::resolve(family, gamma)?;
    if psi.radius() > chain.radius {
        return Err(Error::RadiusTooLarge {
            radius: psi.radius().to_f64_lossy(),
            limit: chain.radius.to_f64_lossy(),
        });
    }
    let offsets = lattice(k, psi.radius(), opts.nodes_per_radius);
    let multiindices = enumerate_multiindices(k, k);
    let per_node: Vec<Vec<T>> = offsets.iter().map(|o| psi.derivatives_upto(k, o)).collect();
    let mass = per_node.iter().fold(T::zero(), |a, d| a + d[0]);
    if !(mass > T::zero()) {
        return Err(Error::InvalidParams(
            "mollifier lattice has zero mass".into(),
        ));
    }
    let kernels: Vec<Vec<T>> = multiindices
        .iter()
        .enumerate()
        .map(|(a, mu)| {
            let sign = if mu.order() % 2 == 0 {
                T::one()
            } else {
                -T::one()
            };
            per_node.iter().map(|d| sign * d[a] / mass).collect()
        })
        .collect();
    let c_mu: Vec<T> = kernels
        .iter()
        .map(|kern| chain.constant * kern.iter().fold(T::zero(), |a, &v| a + v.abs()))
        .collect();

    let mut sw = SmoothedWeight {
        source: family.weight(&chain.gamma_prime)?.clone(),
        chain,
        mollifier: psi.clone(),
        offsets,
        multiindices,
        kernels,
        c_mu,
        discrete_mass: mass * (psi.radius() / T::from_count(opts.nodes_per_radius)).powi(k as i32),
        checks: Vec::new(),
    };
    sw.checks = verify(&sw, family, grid, opts.tol)?;
    for t in &sw.checks {
        if !t.passed {
            return Err(Error::InequalityViolated {
                which: if t.name.starts_with("lower") {
                    "M_g <= C M~"
                } else {
                    "|d^mu M~| <= C_mu M_g''"
                },
                ratio: t.worst_ratio,
                at: parse_point(t.worst_at.as_deref()),
            });
        }
    }
    Ok(sw)
}

fn parse_point(s: Option<&str>) -> Vec<f64> {
    s.map(|s| {
        s.trim_matches(|c| c == '(' || c == ')')
            .split(", ")
            .filter_map(|v| v.parse().ok())
            .collect()
    })
    .unwrap_or_default()
}

fn verify<T: Scalar>(
    sw: &SmoothedWeight<T>,
    family: &DefiningFamily<T>,
    grid: &Grid<T>,
    tol: T,
) -> Result<Vec<InequalityTally>> {
    let lower = family.weight(&sw.chain.gamma)?.values_on(grid)?;
    let upper = family
        .weight(&sw.chain.gamma_double_prime)?
        .values_on(grid)?;
    let derivs: Vec<Vec<T>> = (0..grid.len())
        .into_par_iter()
        .map(|i| sw.derivatives(&grid.point(i)))
        .collect();
    let tol = tol.to_f64_lossy();
    let c = sw.chain.constant;
    let mut low = InequalityTally::new(format!("lower[M_{} <= C M~]", sw.chain.gamma), tol);
    let mut ups: Vec<InequalityTally> = sw
        .multiindices
        .iter()
        .map(|mu| {
            InequalityTally::new(
                format!(
                    "derivative[{:?}: |d M~| <= C_mu M_{}]",
                    mu.components(),
                    sw.chain.gamma_double_prime
                ),
                tol,
            )
        })
        .collect();
    for (i, d) in derivs.iter().enumerate() {
        if !d.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "smoothed weight at {:?}",
                grid.point(i)
            )));
        }
        low.push(lower[i], c * d[0], || fmt_point(&grid.point(i)));
        for (a, t) in ups.iter_mut().enumerate() {
            t.push(d[a].abs(), sw.c_mu[a] * upper[i], || {
                fmt_point(&grid.point(i))
            });
        }
    }
    let mut out = vec![low];
    out.append(&mut ups);
    Ok(out)
}
