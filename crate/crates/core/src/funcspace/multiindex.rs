use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Orders of partial differentiation per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        Self(components)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Unit index along `axis`, scaled by `order`.
    pub fn axis(dim: usize, axis: usize, order: usize) -> Self {
        let mut c = vec![0; dim];
        c[axis] = order;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|mu|`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `mu!` = product of component factorials.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (1..=c).map(|i| i as f64).product::<f64>())
            .product()
    }

    /// Componentwise `nu <= self`.
    pub fn dominates(&self, nu: &MultiIndex) -> bool {
        self.0.iter().zip(&nu.0).all(|(a, b)| b <= a)
    }

    pub fn checked_sub(&self, nu: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&nu.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All `nu <= self` componentwise, in graded order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        enumerate_multiindices(self.dim(), self.order())
            .into_iter()
            .filter(|nu| self.dominates(nu))
            .collect()
    }

    /// `prod_i binom(mu_i, nu_i)`.
    pub fn binomial(&self, nu: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&nu.0)
            .map(|(&a, &b)| crate::scalar::binomial(a, b) as f64)
            .product()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in `k` variables with `|mu| <= m`, graded by order and
/// reverse-lexicographic within an order: `(1,0)` precedes `(0,1)`.
pub fn enumerate_multiindices(k: usize, m: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=m {
        let mut current = vec![0; k];
        compositions(d, 0, &mut current, &mut out);
    }
    out
}

fn compositions(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let k = current.len();
    if k == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == k - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        current[pos] = c;
        compositions(remaining - c, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `q(m)`: number of multi-indices in `k` variables with `|mu| <= m`.
pub fn multiindex_count(k: usize, m: usize) -> u128 {
    crate::scalar::binomial(m + k, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_listing() {
        let idx = enumerate_multiindices(1, 3);
        let comps: Vec<_> = idx.iter().map(|m| m.components().to_vec()).collect();
        assert_eq!(comps, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn two_dimensional_graded_order() {
        let idx = enumerate_multiindices(2, 2);
        let comps: Vec<_> = idx.iter().map(|m| m.components().to_vec()).collect();
        assert_eq!(
            comps,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn order_zero_in_three_variables() {
        let idx = enumerate_multiindices(3, 0);
        assert_eq!(idx, vec![MultiIndex::zero(3)]);
        assert_eq!(multiindex_count(3, 0), 1);
    }

    #[test]
    fn counts_match_binomial() {
        for k in 1..5 {
            for m in 0..7 {
                assert_eq!(
                    enumerate_multiindices(k, m).len() as u128,
                    multiindex_count(k, m)
                );
            }
        }
    }

    #[test]
    fn sub_indices_and_binomials() {
        let mu = MultiIndex::new(vec![1, 1]);
        let subs = mu.sub_indices();
        assert_eq!(subs.len(), 4);
        let total: f64 = subs.iter().map(|nu| mu.binomial(nu)).sum();
        assert_eq!(total, 4.0);
        assert_eq!(MultiIndex::new(vec![2, 3]).factorial(), 12.0);
    }
}
