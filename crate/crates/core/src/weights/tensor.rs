use std::sync::Arc;

use super::family::{CondIIWitness, CondIWitness, DefiningFamily, Member};
use super::weight::{WeightFunction, WeightKind};
use crate::scalar::Scalar;

/// `(M (x) N)_{(g, w)}(x, y) = M_g(x) N_w(y)` on `R^{k1 + k2}`.
#[derive(Clone, Debug)]
pub struct TensorFamily<T> {
    left: DefiningFamily<T>,
    right: DefiningFamily<T>,
    family: DefiningFamily<T>,
}

impl<T: Scalar> TensorFamily<T> {
    pub fn left(&self) -> &DefiningFamily<T> {
        &self.left
    }

    pub fn right(&self) -> &DefiningFamily<T> {
        &self.right
    }

    /// The product as an ordinary family over pair indices `(g, w)`.
    pub fn family(&self) -> &DefiningFamily<T> {
        &self.family
    }

    pub fn into_family(self) -> DefiningFamily<T> {
        self.family
    }
}

/// All index pairs, left index outermost. Witnesses exist for a pair when
/// both factors carry one: (I) multiplies the `L` functions, (II) takes the
/// smaller radius and the product of constants.
pub fn tensor_family<T: Scalar>(m: &DefiningFamily<T>, n: &DefiningFamily<T>) -> TensorFamily<T> {
    let dim = m.dim() + n.dim();
    let mut members = Vec::with_capacity(m.len() * n.len());
    for a in m.members() {
        for b in n.members() {
            let cond_i = match (&a.cond_i, &b.cond_i) {
                (Some(wa), Some(wb)) => Some(CondIWitness {
                    target: wa.target.concat(&wb.target),
                    l: Arc::new(WeightFunction::tensor(wa.l.clone(), wb.l.clone())),
                }),
                _ => None,
            };
            let cond_ii = match (&a.cond_ii, &b.cond_ii) {
                (Some(wa), Some(wb)) => Some(CondIIWitness {
                    target: wa.target.concat(&wb.target),
                    radius: wa.radius.min(wb.radius),
                    constant: wa.constant * wb.constant,
                }),
                _ => None,
            };
            let rank = match (&a.rank, &b.rank) {
                (Some(ra), Some(rb)) => Some(ra.iter().chain(rb).copied().collect()),
                _ => None,
            };
            members.push(Member {
                index: a.index.concat(&b.index),
                weight: Arc::new(WeightFunction::tensor(a.weight.clone(), b.weight.clone())),
                cond_i,
                cond_ii,
                rank,
            });
        }
    }
    let family = DefiningFamily::new(dim, WeightKind::Tensor, members)
        .expect("product of valid families is valid");
    TensorFamily {
        left: m.clone(),
        right: n.clone(),
        family,
    }
}
