use std::sync::Arc;

use serde::Serialize;

use super::weight::{IndexLabel, WeightFunction, WeightKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Condition (I): `M_gamma <= L * M_target` with `L` summable and decaying.
#[derive(Clone, Debug)]
pub struct CondIWitness<T> {
    pub target: IndexLabel<T>,
    pub l: Arc<WeightFunction<T>>,
}

/// Condition (II): `M_gamma(x) <= C * M_target(x + y)` for `|y| <= radius`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CondIIWitness<T> {
    pub target: IndexLabel<T>,
    pub radius: T,
    pub constant: T,
}

#[derive(Clone, Debug)]
pub struct Member<T> {
    pub index: IndexLabel<T>,
    pub weight: Arc<WeightFunction<T>>,
    pub cond_i: Option<CondIWitness<T>>,
    pub cond_ii: Option<CondIIWitness<T>>,
    /// Position in each monotone factor chain; used to pick condition (a)
    /// witnesses by componentwise maximum.
    pub rank: Option<Vec<usize>>,
}

impl<T: Scalar> Member<T> {
    pub fn new(index: IndexLabel<T>, weight: WeightFunction<T>) -> Self {
        Self {
            index,
            weight: Arc::new(weight),
            cond_i: None,
            cond_ii: None,
            rank: None,
        }
    }
}

/// Finite ordered list of weights with explicit witnesses.
#[derive(Clone, Debug)]
pub struct DefiningFamily<T> {
    dim: usize,
    kind: WeightKind,
    members: Vec<Member<T>>,
}

impl<T: Scalar> DefiningFamily<T> {
    /// Validates indices and witnesses: labels are distinct, every witness
    /// target is listed, radii and constants are positive.
    pub fn new(dim: usize, kind: WeightKind, members: Vec<Member<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParams("index list is empty".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if m.weight.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.weight.dim(),
                });
            }
            if members[..i].iter().any(|o| o.index == m.index) {
                return Err(Error::InvalidParams(format!("duplicate index {}", m.index)));
            }
        }
        let has = |l: &IndexLabel<T>| members.iter().any(|m| &m.index == l);
        for m in &members {
            if let Some(w) = &m.cond_i {
                if !has(&w.target) {
                    return Err(Error::WitnessRequirements(format!(
                        "condition (I) witness of {} targets unlisted index {}",
                        m.index, w.target
                    )));
                }
                if w.l.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: w.l.dim(),
                    });
                }
            }
            if let Some(w) = &m.cond_ii {
                if !has(&w.target) {
                    return Err(Error::WitnessRequirements(format!(
                        "condition (II) witness of {} targets unlisted index {}",
                        m.index, w.target
                    )));
                }
                if !(w.radius > T::zero() && w.constant > T::zero())
                    || !w.radius.is_finite()
                    || !w.constant.is_finite()
                {
                    return Err(Error::WitnessRequirements(format!(
                        "condition (II) witness of {} needs radius > 0 and C > 0",
                        m.index
                    )));
                }
            }
        }
        Ok(Self { dim, kind, members })
    }

    /// The single weight `M = 1` with the trivial (II) witness.
    pub fn constant_one(dim: usize) -> Self {
        let idx = IndexLabel::scalar(T::zero());
        let mut m = Member::new(idx.clone(), WeightFunction::constant(dim, T::one()));
        m.cond_ii = Some(CondIIWitness {
            target: idx,
            radius: T::one(),
            constant: T::one(),
        });
        m.rank = Some(vec![0]);
        Self {
            dim,
            kind: WeightKind::Custom,
            members: vec![m],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn members(&self) -> &[Member<T>] {
        &self.members
    }

    pub fn indices(&self) -> Vec<IndexLabel<T>> {
        self.members.iter().map(|m| m.index.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, index: &IndexLabel<T>) -> Result<&Member<T>> {
        self.members
            .iter()
            .find(|m| &m.index == index)
            .ok_or_else(|| Error::IndexNotFound(index.to_string()))
    }

    pub fn weight(&self, index: &IndexLabel<T>) -> Result<&Arc<WeightFunction<T>>> {
        Ok(&self.member(index)?.weight)
    }

    pub fn cond_i(&self, index: &IndexLabel<T>) -> Result<&CondIWitness<T>> {
        self.member(index)?
            .cond_i
            .as_ref()
            .ok_or_else(|| Error::MissingWitness {
                condition: "I",
                index: index.to_string(),
            })
    }

    pub fn cond_ii(&self, index: &IndexLabel<T>) -> Result<&CondIIWitness<T>> {
        self.member(index)?
            .cond_ii
            .as_ref()
            .ok_or_else(|| Error::MissingWitness {
                condition: "II",
                index: index.to_string(),
            })
    }

    /// Replaces the condition (I) witness of one index.
    pub fn with_cond_i(mut self, index: &IndexLabel<T>, witness: CondIWitness<T>) -> Result<Self> {
        let pos = self.position(index)?;
        self.members[pos].cond_i = Some(witness);
        Self::new(self.dim, self.kind, self.members)
    }

    /// Replaces the condition (II) witness of one index.
    pub fn with_cond_ii(
        mut self,
        index: &IndexLabel<T>,
        witness: CondIIWitness<T>,
    ) -> Result<Self> {
        let pos = self.position(index)?;
        self.members[pos].cond_ii = Some(witness);
        Self::new(self.dim, self.kind, self.members)
    }

    fn position(&self, index: &IndexLabel<T>) -> Result<usize> {
        self.members
            .iter()
            .position(|m| &m.index == index)
            .ok_or_else(|| Error::IndexNotFound(index.to_string()))
    }

    /// Condition (a) witness `(gamma, C)` for a pair of indices, available
    /// when weights are monotone along each factor's list: the componentwise
    /// later index with `C = 1/2`.
    pub fn cond_a_witness(
        &self,
        g1: &IndexLabel<T>,
        g2: &IndexLabel<T>,
    ) -> Result<(IndexLabel<T>, T)> {
        let r1 = self.member(g1)?.rank.clone();
        let r2 = self.member(g2)?.rank.clone();
        let (Some(r1), Some(r2)) = (r1, r2) else {
            return Err(Error::MissingWitness {
                condition: "a",
                index: format!("{g1}, {g2}"),
            });
        };
        let target: Vec<usize> = r1.iter().zip(&r2).map(|(a, b)| *a.max(b)).collect();
        self.members
            .iter()
            .find(|m| m.rank.as_ref() == Some(&target))
            .map(|m| (m.index.clone(), T::lit(0.5)))
            .ok_or_else(|| Error::MissingWitness {
                condition: "a",
                index: format!("{g1}, {g2}"),
            })
    }
}

/// Builds one of the built-in families with analytic witnesses attached.
///
/// `params` are kind-specific: `[alpha, A]` for `GelfandShilovExp`, empty
/// otherwise. `indices` lists `l` (polynomial), `n` (boxes `[-n, n]^k`),
/// `A'` (Gelfand-Shilov) or `a` (exp-type). For `ExpTypeAnalytic`, `k` is
/// the complex dimension and the family lives on `R^{2k}`.
pub fn make_family<T: Scalar>(
    kind: WeightKind,
    params: &[T],
    indices: &[T],
    k: usize,
) -> Result<DefiningFamily<T>> {
    if k == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    if indices.is_empty() {
        return Err(Error::InvalidParams("index list is empty".into()));
    }
    if indices.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("indices must be finite".into()));
    }
    let expect_params = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{kind} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let family = match kind {
        WeightKind::Polynomial => {
            expect_params(0)?;
            if indices
                .iter()
                .any(|l| *l < T::zero() || !l.fract().is_zero())
            {
                return Err(Error::InvalidParams(
                    "polynomial indices must be nonnegative integers".into(),
                ));
            }
            polynomial(k, sorted(indices, false))?
        }
        WeightKind::IndicatorBox => {
            expect_params(0)?;
            if indices.iter().any(|n| *n <= T::zero()) {
                return Err(Error::InvalidParams(
                    "box half-widths must be positive".into(),
                ));
            }
            indicator(k, sorted(indices, false))?
        }
        WeightKind::GelfandShilovExp => {
            expect_params(2)?;
            let (alpha, a) = (params[0], params[1]);
            if !(alpha > T::zero()) || !(a >= T::zero()) {
                return Err(Error::InvalidParams(
                    "Gelfand-Shilov needs alpha > 0 and A >= 0".into(),
                ));
            }
            if indices.iter().any(|v| *v <= a) {
                return Err(Error::InvalidParams(format!(
                    "Gelfand-Shilov indices must exceed A = {a}"
                )));
            }
            gelfand_shilov(k, alpha, a, sorted(indices, true))?
        }
        WeightKind::ExpTypeAnalytic => {
            expect_params(0)?;
            if indices.iter().any(|v| *v <= T::zero()) {
                return Err(Error::InvalidParams(
                    "exp-type rates must be positive".into(),
                ));
            }
            exp_type(2 * k, sorted(indices, true))?
        }
        WeightKind::Custom | WeightKind::Tensor => {
            return Err(Error::UnknownKind(format!(
                "{kind} families are not built by make_family"
            )))
        }
    };
    if family.members.iter().all(|m| m.cond_i.is_none()) {
        return Err(Error::WitnessRequirements(format!(
            "no index in the {kind} list has a larger listed index to serve as a condition (I) witness"
        )));
    }
    Ok(family)
}

/// Sorted so that weights increase along the list.
fn sorted<T: Scalar>(v: &[T], descending: bool) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if descending {
        out.reverse();
    }
    out
}

fn assemble<T: Scalar>(
    k: usize,
    kind: WeightKind,
    values: &[T],
    weight: impl Fn(T) -> WeightFunction<T>,
    witnesses: impl Fn(usize) -> (Option<CondIWitness<T>>, Option<CondIIWitness<T>>),
) -> Result<DefiningFamily<T>> {
    let members = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (cond_i, cond_ii) = witnesses(i);
            Member {
                index: IndexLabel::scalar(v),
                weight: Arc::new(weight(v)),
                cond_i,
                cond_ii,
                rank: Some(vec![i]),
            }
        })
        .collect();
    DefiningFamily::new(k, kind, members)
}

fn polynomial<T: Scalar>(k: usize, ls: Vec<T>) -> Result<DefiningFamily<T>> {
    let shift = T::from_count(k + 1);
    assemble(
        k,
        WeightKind::Polynomial,
        &ls,
        |l| WeightFunction::polynomial(k, l),
        |i| {
            let l = ls[i];
            let cond_i = ls.iter().find(|&&t| t == l + shift).map(|&t| CondIWitness {
                target: IndexLabel::scalar(t),
                l: Arc::new(WeightFunction::polynomial(k, -shift)),
            });
            let cond_ii = CondIIWitness {
                target: IndexLabel::scalar(l),
                radius: T::one(),
                constant: T::lit(2.0).powf(l),
            };
            (cond_i, Some(cond_ii))
        },
    )
}

fn indicator<T: Scalar>(k: usize, ns: Vec<T>) -> Result<DefiningFamily<T>> {
    assemble(
        k,
        WeightKind::IndicatorBox,
        &ns,
        |n| WeightFunction::indicator_box(k, n),
        |i| {
            let n = ns[i];
            match ns.iter().find(|&&t| t >= n + T::one()) {
                Some(&t) => (
                    Some(CondIWitness {
                        target: IndexLabel::scalar(t),
                        l: Arc::new(WeightFunction::indicator_box(k, n)),
                    }),
                    Some(CondIIWitness {
                        target: IndexLabel::scalar(t),
                        radius: T::one(),
                        constant: T::one(),
                    }),
                ),
                None => (None, None),
            }
        },
    )
}

/// `M_{A'}(x) = exp(|x / A'|^beta)`, `beta = 1 / alpha`; `scales` descending.
fn gelfand_shilov<T: Scalar>(
    k: usize,
    alpha: T,
    a: T,
    scales: Vec<T>,
) -> Result<DefiningFamily<T>> {
    let beta = alpha.recip();
    let coeff = |s: T| s.powf(-beta);
    let weight = |s: T| {
        WeightFunction::exp_radial(
            k,
            WeightKind::GelfandShilovExp,
            vec![alpha, a, s],
            vec![(coeff(s), beta)],
        )
    };
    assemble(k, WeightKind::GelfandShilovExp, &scales, weight, |i| {
        let s = scales[i];
        let next = scales.get(i + 1).copied();
        let cond_i = next.map(|t| CondIWitness {
            target: IndexLabel::scalar(t),
            l: Arc::new(WeightFunction::exp_radial(
                k,
                WeightKind::GelfandShilovExp,
                vec![alpha, a, s, t],
                vec![(coeff(s), beta), (-coeff(t), beta)],
            )),
        });
        let rho = T::one();
        let cond_ii = if beta <= T::one() {
            // |x|^b <= |x+y|^b + |y|^b for b <= 1
            Some(CondIIWitness {
                target: IndexLabel::scalar(s),
                radius: rho,
                constant: (rho.powf(beta) * coeff(s)).exp(),
            })
        } else {
            // (u + v)^b <= lam^{1-b} u^b + (1-lam)^{1-b} v^b, lam chosen so the
            // first term matches the next scale
            next.map(|t| {
                let lam = (t / s).powf(beta / (beta - T::one()));
                CondIIWitness {
                    target: IndexLabel::scalar(t),
                    radius: rho,
                    constant: ((T::one() - lam).powf(T::one() - beta) * rho.powf(beta) * coeff(s))
                        .exp(),
                }
            })
        };
        (cond_i, cond_ii)
    })
}

/// `M_a(z) = exp(-a |z|)` on `R^{2k}`; `rates` descending.
fn exp_type<T: Scalar>(dim: usize, rates: Vec<T>) -> Result<DefiningFamily<T>> {
    let weight = |a: T| {
        WeightFunction::exp_radial(
            dim,
            WeightKind::ExpTypeAnalytic,
            vec![a],
            vec![(-a, T::one())],
        )
    };
    assemble(dim, WeightKind::ExpTypeAnalytic, &rates, weight, |i| {
        let a = rates[i];
        match rates.get(i + 1) {
            Some(&b) => (
                Some(CondIWitness {
                    target: IndexLabel::scalar(b),
                    l: Arc::new(WeightFunction::exp_radial(
                        dim,
                        WeightKind::ExpTypeAnalytic,
                        vec![a, b],
                        vec![(-(a - b), T::one())],
                    )),
                }),
                Some(CondIIWitness {
                    target: IndexLabel::scalar(b),
                    radius: T::one(),
                    constant: b.exp(),
                }),
            ),
            None => (None, None),
        }
    })
}
