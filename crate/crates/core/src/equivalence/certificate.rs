//! Constants for `||f||_{g,m} <= A ||f||^p_{g~,m~}` and its converse.

use rayon::prelude::*;
use serde::Serialize;

use super::smoothing::{
    smooth_weight, DerivativeConstant, MollifierDescriptor, SmoothedWeight, SmoothingChain,
    SmoothingOptions,
};
use super::tally::InequalityTally;
use crate::error::{Error, Result};
use crate::funcspace::{
    multiindex_count, quadrature_values, Grid, GridDescriptor, Mollifier, SampledFunction,
};
use crate::scalar::Scalar;
use crate::seminorms::{lp_seminorm, sup_seminorm};
use crate::weights::{DefiningFamily, IndexLabel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceOptions<T> {
    /// Mollifier radius as a fraction of the chain radius, in `(0, 1]`.
    pub radius_fraction: T,
    pub nodes_per_radius: usize,
    /// Relative tolerance of every grid comparison.
    pub tol: T,
}

impl<T: Scalar> Default for EquivalenceOptions<T> {
    fn default() -> Self {
        Self {
            radius_fraction: T::one(),
            nodes_per_radius: 16,
            tol: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> EquivalenceOptions<T> {
    pub(crate) fn smoothing(&self) -> SmoothingOptions<T> {
        SmoothingOptions {
            nodes_per_radius: self.nodes_per_radius,
            tol: self.tol,
        }
    }

    pub(crate) fn mollifier(&self, k: usize, chain_radius: T) -> Result<Mollifier<T>> {
        if !(self.radius_fraction > T::zero() && self.radius_fraction <= T::one()) {
            return Err(Error::InvalidParams(
                "mollifier radius fraction must lie in (0, 1]".into(),
            ));
        }
        Mollifier::new(k, self.radius_fraction * chain_radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JKind {
    /// `int L^{p/(p-1)}` over the grid.
    Integral,
    /// `max L` over the grid (`p = 1`).
    Sup,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct EquivalenceCertificate<T> {
    pub gamma: IndexLabel<T>,
    pub m: usize,
    pub p: T,
    pub chain: SmoothingChain<T>,
    pub gamma_tilde: IndexLabel<T>,
    pub m_tilde: usize,
    pub mollifier: MollifierDescriptor<T>,
    /// Condition (II) constant of the chain.
    pub c: T,
    pub c_mu: Vec<DerivativeConstant<T>>,
    pub c_prime: T,
    pub q_m_tilde: u64,
    pub j: T,
    pub j_kind: JKind,
    pub a: T,
    pub grid: GridDescriptor,
    pub checks: Vec<InequalityTally>,
}

pub(crate) fn check_family_grid<T: Scalar>(
    family: &DefiningFamily<T>,
    grid: &Grid<T>,
) -> Result<()> {
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

pub(crate) fn count<T: Scalar>(k: usize, m: usize) -> Result<(u64, T)> {
    let q = multiindex_count(k, m);
    let q = u64::try_from(q).map_err(|_| Error::InvalidParams(format!("q({m}) overflows")))?;
    Ok((q, T::lit(q as f64)))
}

/// Builds the certificate together with the smoothed weight it used.
pub(crate) fn derive_with_smoothing<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    p: T,
    grid: &Grid<T>,
    opts: EquivalenceOptions<T>,
) -> Result<(EquivalenceCertificate<T>, SmoothedWeight<T>)> {
    check_family_grid(family, grid)?;
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidParams(
            "exponent p must be finite and >= 1".into(),
        ));
    }
    let k = family.dim();
    let chain = SmoothingChain::resolve(family, gamma)?;
    let psi = opts.mollifier(k, chain.radius)?;
    let sw = smooth_weight(family, gamma, &psi, grid, opts.smoothing())?;
    let wi = family.cond_i(&chain.gamma_double_prime)?;
    let m_tilde = m + k;
    let (q, qt) = count::<T>(k, m_tilde)?;
    let l = wi.l.values_on(grid)?;
    let c_prime = sw.c_prime();
    let (j, j_kind, a) = if p == T::one() {
        let s = l.iter().fold(T::zero(), |a, &b| a.max(b));
        (s, JKind::Sup, c_prime * s)
    } else {
        let e = p / (p - T::one());
        let lp: Vec<T> = l
            .iter()
            .map(|&v| if v.is_zero() { v } else { v.powf(e) })
            .collect();
        let j = quadrature_values(grid, &lp)?.value;
        (
            j,
            JKind::Integral,
            c_prime * (qt * j).powf((p - T::one()) / p),
        )
    };
    if !j.is_finite() {
        return Err(Error::NonFinite("J integral".into()));
    }
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::NonFinite(format!("equivalence constant A = {a}")));
    }
    let cert = EquivalenceCertificate {
        gamma: gamma.clone(),
        m,
        p,
        c: chain.constant,
        chain,
        gamma_tilde: wi.target.clone(),
        m_tilde,
        mollifier: sw.descriptor(),
        c_mu: sw.derivative_constants(),
        c_prime,
        q_m_tilde: q,
        j,
        j_kind,
        a,
        grid: grid.descriptor(),
        checks: sw.checks().to_vec(),
    };
    Ok((cert, sw))
}

/// Resolves the chain `g -> g' -> g''` (condition (II) twice) and `g~`
/// (condition (I) from `g''`), smooths `M_g'` and assembles `A`.
pub fn derive_equivalence_constants<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    p: T,
    grid: &Grid<T>,
    opts: EquivalenceOptions<T>,
) -> Result<EquivalenceCertificate<T>> {
    derive_with_smoothing(family, gamma, m, p, grid, opts).map(|(c, _)| c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; 0 when both vanish.
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceEntry {
    pub label: String,
    pub forward: Comparison,
    pub reverse: Option<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct EquivalenceReport<T> {
    pub certificate: EquivalenceCertificate<T>,
    /// Condition (I) target of `gamma` used by the converse inclusion.
    pub reverse_target: Option<IndexLabel<T>>,
    pub a2: Option<T>,
    pub entries: Vec<EquivalenceEntry>,
    pub forward: InequalityTally,
    pub reverse: Option<InequalityTally>,
    pub passed: bool,
}

pub(crate) fn common_grid<T: Scalar, V: crate::scalar::FieldValue<T>>(
    corpus: &[SampledFunction<T, V>],
) -> Result<&Grid<T>> {
    let first = corpus
        .first()
        .ok_or_else(|| Error::InvalidParams("corpus is empty".into()))?;
    let d = first.grid().descriptor();
    if corpus.iter().any(|f| f.grid().descriptor() != d) {
        return Err(Error::InvalidGrid(
            "corpus members live on different grids".into(),
        ));
    }
    Ok(first.grid())
}

pub(crate) fn label<T: Scalar, V: crate::scalar::FieldValue<T>>(
    f: &SampledFunction<T, V>,
    i: usize,
) -> String {
    if f.label().is_empty() {
        format!("#{i}")
    } else {
        f.label().to_string()
    }
}

pub(crate) fn record<T: Scalar>(
    tally: &mut InequalityTally,
    lhs: T,
    rhs: T,
    at: &str,
) -> Comparison {
    let ratio = tally.push(lhs, rhs, || at.to_string());
    Comparison {
        lhs: lhs.to_f64_lossy(),
        rhs: rhs.to_f64_lossy(),
        ratio,
        passed: ratio <= 1.0 + tally.tol,
    }
}

/// Checks `||f||_{g,m} <= A ||f||^p_{g~,m~}` for every corpus member, and
/// `||f||^p_{g,m} <= A2 ||f||_{g',m}` with `A2 = (q(m) int L^p)^{1/p}` when
/// `g` has a condition (I) witness.
pub fn verify_norm_equivalence<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    p: T,
    corpus: &[SampledFunction<T>],
    opts: EquivalenceOptions<T>,
) -> Result<EquivalenceReport<T>> {
    let grid = common_grid(corpus)?;
    let cert = derive_equivalence_constants(family, gamma, m, p, grid, opts)?;
    let reverse_witness = family.cond_i(gamma).ok();
    let a2 = match reverse_witness {
        Some(w) => {
            let l = w.l.values_on(grid)?;
            let lp: Vec<T> = l
                .iter()
                .map(|&v| if v.is_zero() { v } else { v.powf(p) })
                .collect();
            let (_, q) = count::<T>(family.dim(), m)?;
            Some((q * quadrature_values(grid, &lp)?.value).powf(p.recip()))
        }
        None => None,
    };
    let sides: Vec<Result<(T, T, Option<(T, T)>)>> = corpus
        .par_iter()
        .map(|f| {
            let lhs = sup_seminorm(f, family, gamma, m)?.value;
            let rhs = cert.a * lp_seminorm(f, family, &cert.gamma_tilde, cert.m_tilde, p)?.value;
            let rev = match (reverse_witness, a2) {
                (Some(w), Some(a2)) => Some((
                    lp_seminorm(f, family, gamma, m, p)?.value,
                    a2 * sup_seminorm(f, family, &w.target, m)?.value,
                )),
                _ => None,
            };
            Ok((lhs, rhs, rev))
        })
        .collect();
    let tol = opts.tol.to_f64_lossy();
    let mut forward = InequalityTally::new(format!("sup <= A L^p [{gamma}, m={m}, p={p}]"), tol);
    let mut reverse = reverse_witness
        .map(|_| InequalityTally::new(format!("L^p <= A2 sup [{gamma}, m={m}, p={p}]"), tol));
    let mut entries = Vec::with_capacity(corpus.len());
    for (i, (f, s)) in corpus.iter().zip(sides).enumerate() {
        let (lhs, rhs, rev) = s?;
        let name = label(f, i);
        let fwd = record(&mut forward, lhs, rhs, &name);
        let rev = match (rev, reverse.as_mut()) {
            (Some((l, r)), Some(t)) => Some(record(t, l, r, &name)),
            _ => None,
        };
        entries.push(EquivalenceEntry {
            label: name,
            forward: fwd,
            reverse: rev,
        });
    }
    let passed = forward.passed && reverse.as_ref().is_none_or(|t| t.passed);
    Ok(EquivalenceReport {
        certificate: cert,
        reverse_target: reverse_witness.map(|w| w.target.clone()),
        a2,
        entries,
        forward,
        reverse,
        passed,
    })
}
