//! Discretized dominating-measure bound for `||f||_{g,m}`.

use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{
    common_grid, derive_with_smoothing, label, record, Comparison, EquivalenceCertificate,
    EquivalenceOptions,
};
use super::smoothing::{smooth_weight, SmoothingChain};
use super::tally::InequalityTally;
use crate::error::{Error, Result};
use crate::funcspace::SampledFunction;
use crate::scalar::Scalar;
use crate::seminorms::sup_seminorm;
use crate::weights::{DefiningFamily, IndexLabel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuclearityEntry {
    pub label: String,
    pub bound: Comparison,
    /// `rhs / lhs`; infinity when `lhs = 0 < rhs`, 1 when both vanish.
    pub margin: f64,
    /// `max |e^mu_x(f)|` against `||f||_{g~'',m~}`.
    pub polar: Comparison,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct NuclearityReport<T> {
    /// The `p = 1` certificate.
    pub certificate: EquivalenceCertificate<T>,
    pub gamma_tilde_prime: IndexLabel<T>,
    /// Chain of the second smoothing, starting at `g~'`.
    pub second_chain: SmoothingChain<T>,
    pub second_checks: Vec<InequalityTally>,
    pub entries: Vec<NuclearityEntry>,
    pub bound: InequalityTally,
    pub polar: InequalityTally,
    pub passed: bool,
}

/// Checks `||f||_{g,m} <= A C^2 sum_q w_q L(x_q) sum_{|mu| <= m~} |M~(x_q) d^mu f(x_q)| / C`,
/// the quadrature form of integrating `|e^mu_x(f)|`, `e^mu_x(f) = M~(x) d^mu f(x) / C`,
/// against `L(x) dx`. `A`, `g~`, `m~` come from the `p = 1` certificate,
/// `L` is the condition (I) witness `g~ -> g~'`, and `M~`, `C` come from
/// smoothing `g~'`, so that `M_{g~'} <= C M~ <= C^2 M_{g~''}`.
pub fn verify_pietsch_bound<T: Scalar>(
    family: &DefiningFamily<T>,
    gamma: &IndexLabel<T>,
    m: usize,
    corpus: &[SampledFunction<T>],
    opts: EquivalenceOptions<T>,
) -> Result<NuclearityReport<T>> {
    let grid = common_grid(corpus)?;
    let (cert, _) = derive_with_smoothing(family, gamma, m, T::one(), grid, opts)?;
    let wi = family.cond_i(&cert.gamma_tilde)?;
    let gamma_tp = wi.target.clone();
    let chain2 = SmoothingChain::resolve(family, &gamma_tp)?;
    let psi = opts.mollifier(family.dim(), chain2.radius)?;
    let sw = smooth_weight(family, &gamma_tp, &psi, grid, opts.smoothing())?;
    let c = chain2.constant;
    let l = wi.l.values_on(grid)?;
    let mt = sw.values_on(grid);
    let w = grid.quadrature_weights();
    let m_tilde = cert.m_tilde;
    let outer = chain2.gamma_double_prime.clone();

    let sides: Vec<Result<(T, T, T, T)>> = corpus
        .par_iter()
        .map(|f| {
            let lhs = sup_seminorm(f, family, gamma, m)?.value;
            let (table, _) = f.derivative_table(m_tilde)?;
            let mut acc = T::zero();
            let mut eps_max = T::zero();
            for q in 0..grid.len() {
                let mut s = T::zero();
                for col in &table {
                    let e = mt[q] * col[q].abs() / c;
                    eps_max = eps_max.max(e);
                    s = s + e;
                }
                if !l[q].is_zero() && !w[q].is_zero() {
                    acc = acc + w[q] * l[q] * s;
                }
            }
            let rhs = cert.a * c * c * acc;
            if !rhs.is_finite() {
                return Err(Error::NonFinite("dominating-measure sum".into()));
            }
            let polar_rhs = sup_seminorm(f, family, &outer, m_tilde)?.value;
            Ok((lhs, rhs, eps_max, polar_rhs))
        })
        .collect();

    let tol = opts.tol.to_f64_lossy();
    let mut bound = InequalityTally::new(format!("||f||_[{gamma},{m}] <= int |e(f)| d tau"), tol);
    let mut polar = InequalityTally::new(format!("|e^mu_x(f)| <= ||f||_[{outer},{m_tilde}]"), tol);
    let mut entries = Vec::with_capacity(corpus.len());
    for (i, (f, s)) in corpus.iter().zip(sides).enumerate() {
        let (lhs, rhs, eps, prhs) = s?;
        let name = label(f, i);
        let b = record(&mut bound, lhs, rhs, &name);
        let margin = if b.lhs > 0.0 {
            b.rhs / b.lhs
        } else if b.rhs > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        let p = record(&mut polar, eps, prhs, &name);
        entries.push(NuclearityEntry {
            label: name,
            bound: b,
            margin,
            polar: p,
        });
    }
    let passed = bound.passed && polar.passed;
    Ok(NuclearityReport {
        certificate: cert,
        gamma_tilde_prime: gamma_tp,
        second_chain: chain2,
        second_checks: sw.checks().to_vec(),
        entries,
        bound,
        polar,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::jet::Jet;
    use crate::funcspace::{make_corpus, CorpusKind, Grid, JetSmooth, SmoothRef};
    use crate::weights::{make_family, WeightKind};

    fn idx(v: f64) -> IndexLabel<f64> {
        IndexLabel::scalar(v)
    }

    fn poly() -> DefiningFamily<f64> {
        make_family(
            WeightKind::Polynomial,
            &[],
            &(0..=8).map(f64::from).collect::<Vec<_>>(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_and_zero() {
        let g = Grid::line(-10.0, 10.0, 1001).unwrap();
        let f: SmoothRef<f64, f64> =
            Arc::new(JetSmooth::new(1, |x: &[Jet<f64>]| (-(&x[0] * &x[0])).exp()));
        let corpus = vec![
            SampledFunction::from_smooth(g.clone(), f)
                .unwrap()
                .with_label("gauss"),
            SampledFunction::from_fn(g.clone(), |_| 0.0)
                .unwrap()
                .with_label("zero"),
        ];
        let rep = verify_pietsch_bound(&poly(), &idx(0.0), 0, &corpus, Default::default()).unwrap();
        assert!(rep.passed);
        assert!((rep.entries[0].bound.lhs - 1.0).abs() < 1e-12);
        assert!(rep.entries[0].margin >= 1.0);
        assert_eq!(rep.entries[1].bound.ratio, 0.0);
        assert_eq!(rep.gamma_tilde_prime, idx(4.0));
    }

    #[test]
    fn hermite_three() {
        let g = Grid::line(-12.0, 12.0, 1201).unwrap();
        let corpus = make_corpus(CorpusKind::Hermite, 4, 1, &g)
            .unwrap()
            .into_real()
            .unwrap();
        let rep =
            verify_pietsch_bound(&poly(), &idx(1.0), 1, &corpus[3..], Default::default()).unwrap();
        assert!(rep.passed, "{:?}", rep.bound);
    }
}
