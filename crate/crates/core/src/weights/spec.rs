//! JSON descriptions of families.
//!
//! ```json
//! {"kind": "gelfand-shilov-exp", "k": 1, "params": {"alpha": 1, "A": 1}, "indices": [1.5, 2, 3]}
//! {"kind": "custom", "k": 1, "indices": [0, 2],
//!  "params": {"weight": "pow(1 + norm(x), g)",
//!             "cond_i": [{"index": 0, "target": 2, "l": "pow(1 + norm(x), -2)"}],
//!             "cond_ii": [{"index": 0, "target": 0, "radius": 1, "constant": 1}]}}
//! {"kind": "tensor", "left": {...}, "right": {...}}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::{make_family, CondIIWitness, CondIWitness, DefiningFamily, Member};
use super::tensor::tensor_family;
use super::weight::{IndexLabel, WeightFunction, WeightKind};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cond_i: Vec<CondISpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cond_ii: Vec<CondIISpec>,
    /// Custom families only: weights increase along the index list, which
    /// enables automatic condition (a) witnesses.
    #[serde(default)]
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondISpec {
    pub index: f64,
    pub target: f64,
    pub l: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondIISpec {
    pub index: f64,
    pub target: f64,
    pub radius: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub params: FamilyParams,
    #[serde(default)]
    pub indices: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<FamilySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<FamilySpec>>,
}

impl FamilySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn build<T: Scalar>(&self) -> Result<DefiningFamily<T>> {
        let kind: WeightKind = self.kind.parse()?;
        let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        match kind {
            WeightKind::Tensor => {
                let (Some(l), Some(r)) = (&self.left, &self.right) else {
                    return Err(Error::InvalidParams(
                        "tensor family needs `left` and `right`".into(),
                    ));
                };
                Ok(tensor_family(&l.build()?, &r.build()?).into_family())
            }
            WeightKind::Custom => self.build_custom(),
            WeightKind::GelfandShilovExp => {
                let (Some(alpha), Some(a)) = (self.params.alpha, self.params.a) else {
                    return Err(Error::InvalidParams(
                        "gelfand-shilov-exp needs params alpha and A".into(),
                    ));
                };
                self.only_builtin_params()?;
                make_family(kind, &lit(&[alpha, a]), &lit(&self.indices), self.k)
            }
            _ => {
                if self.params.alpha.is_some() || self.params.a.is_some() {
                    return Err(Error::InvalidParams(format!(
                        "{kind} takes no alpha/A parameters"
                    )));
                }
                self.only_builtin_params()?;
                make_family(kind, &[], &lit(&self.indices), self.k)
            }
        }
    }

    fn only_builtin_params(&self) -> Result<()> {
        let p = &self.params;
        if p.weight.is_some() || !p.cond_i.is_empty() || !p.cond_ii.is_empty() || p.monotone {
            return Err(Error::InvalidParams(format!(
                "{} witnesses are attached automatically; weight/cond_i/cond_ii/monotone are for custom families",
                self.kind
            )));
        }
        Ok(())
    }

    fn build_custom<T: Scalar>(&self) -> Result<DefiningFamily<T>> {
        let k = self.k;
        let src = self
            .params
            .weight
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("custom family needs params.weight".into()))?;
        let expr = Arc::new(Expr::parse(src)?);
        let mut members = Vec::with_capacity(self.indices.len());
        for (i, &g) in self.indices.iter().enumerate() {
            let gv = T::lit(g);
            let mut m = Member::new(
                IndexLabel::scalar(gv),
                WeightFunction::expression(k, expr.clone(), Some(gv))?,
            );
            if self.params.monotone {
                m.rank = Some(vec![i]);
            }
            members.push(m);
        }
        let find = |g: f64| {
            members
                .iter()
                .position(|m| m.index == IndexLabel::scalar(T::lit(g)))
                .ok_or_else(|| Error::IndexNotFound(g.to_string()))
        };
        let mut cond_i = Vec::new();
        for w in &self.params.cond_i {
            let pos = find(w.index)?;
            let l =
                WeightFunction::expression(k, Arc::new(Expr::parse(&w.l)?), Some(T::lit(w.index)))?;
            cond_i.push((
                pos,
                CondIWitness {
                    target: IndexLabel::scalar(T::lit(w.target)),
                    l: Arc::new(l),
                },
            ));
        }
        let mut cond_ii = Vec::new();
        for w in &self.params.cond_ii {
            cond_ii.push((
                find(w.index)?,
                CondIIWitness {
                    target: IndexLabel::scalar(T::lit(w.target)),
                    radius: T::lit(w.radius),
                    constant: T::lit(w.constant),
                },
            ));
        }
        for (pos, w) in cond_i {
            members[pos].cond_i = Some(w);
        }
        for (pos, w) in cond_ii {
            members[pos].cond_ii = Some(w);
        }
        DefiningFamily::new(k, WeightKind::Custom, members)
    }
}
