//! Property checks shared by the property suite and the acceptance run.
//! Each runs a deterministic proptest runner with `CASES` cases.

#![allow(dead_code)]

use std::sync::Arc;

use num_complex::Complex;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use wfs::equivalence::{verify_norm_equivalence, EquivalenceOptions};
use wfs::funcspace::{
    enumerate_multiindices, integrate, make_corpus, multiindex_count, CorpusKind,
    DiscreteFunctional, Grid, Jet, JetSmooth, Mollifier, MultiIndex, SampledFunction, SmoothRef,
};
use wfs::kernel::{
    apply_functional, density_decay_report, separable_approx, slice, weighted_distance, KernelFn,
    TwoVariableFunction,
};
use wfs::seminorms::{analytic_lp_seminorm, analytic_sup_seminorm, lp_seminorm, sup_seminorm};
use wfs::weights::{
    check_family, make_family, DecayOptions, DefiningFamily, IndexLabel, WeightFunction, WeightKind,
};

pub const CASES: u32 = 100;

pub type Check = fn() -> Result<(), String>;

/// Every invariant, by name.
pub const ALL: &[(&str, Check)] = &[
    ("weight evaluation is deterministic", weight_determinism),
    (
        "polynomial weights increase with the index",
        polynomial_weight_monotone,
    ),
    (
        "multi-index count is binomial(m+k, k)",
        multiindex_count_is_binomial,
    ),
    (
        "quadrature integrates cubics exactly",
        quadrature_cubic_exact,
    ),
    ("exact derivatives compose", exact_derivatives_compose),
    (
        "mollifier has unit mass and ball support",
        mollifier_mass_and_support,
    ),
    ("seminorms are absolutely homogeneous", seminorm_homogeneity),
    (
        "seminorms satisfy the triangle inequality",
        seminorm_triangle,
    ),
    (
        "seminorms increase with the order m",
        seminorm_monotone_in_m,
    ),
    (
        "seminorms increase with the weight",
        seminorm_monotone_in_weight,
    ),
    (
        "equivalence verdicts are scale invariant",
        verdict_scale_invariance,
    ),
    ("functional images are bilinear", functional_bilinearity),
    ("delta images are columns", delta_image_is_column),
    ("separable residual decreases with rank", residual_monotone),
    ("weighted SVD is optimal at rank 3", svd_optimality),
    ("reports are deterministic", report_determinism),
];

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner()
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

fn idx(v: f64) -> IndexLabel<f64> {
    IndexLabel::scalar(v)
}

pub fn poly_family() -> DefiningFamily<f64> {
    make_family(
        WeightKind::Polynomial,
        &[],
        &(0..=8).map(f64::from).collect::<Vec<_>>(),
        1,
    )
    .unwrap()
}

pub fn exp_family() -> DefiningFamily<f64> {
    make_family(WeightKind::ExpTypeAnalytic, &[], &[1.0, 0.5, 0.25], 1).unwrap()
}

fn hermite_basis(grid: &Grid<f64>, n: usize) -> Vec<SampledFunction<f64>> {
    make_corpus(CorpusKind::Hermite, n, 1, grid)
        .unwrap()
        .into_real()
        .unwrap()
}

fn combine(basis: &[SampledFunction<f64>], c: &[f64]) -> SampledFunction<f64> {
    let mut out = basis[0].scaled(c[0]);
    for (b, &ci) in basis.iter().zip(c).skip(1) {
        out = out.sum(&b.scaled(ci)).unwrap();
    }
    out
}

fn entire_basis(grid: &Grid<f64>) -> Vec<SampledFunction<f64, Complex<f64>>> {
    make_corpus(CorpusKind::Entire, 6, 1, grid)
        .unwrap()
        .into_complex()
        .unwrap()
}

fn combine_complex(
    basis: &[SampledFunction<f64, Complex<f64>>],
    c: &[f64],
) -> SampledFunction<f64, Complex<f64>> {
    let values: Vec<Complex<f64>> = (0..basis[0].values().len())
        .map(|i| basis.iter().zip(c).map(|(b, &ci)| b.values()[i] * ci).sum())
        .collect();
    SampledFunction::from_values(basis[0].grid().clone(), values)
        .unwrap()
        .with_analytic(true)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn weight_determinism() -> Result<(), String> {
    let fam = poly_family();
    let gs = make_family(
        WeightKind::GelfandShilovExp,
        &[1.0, 1.0],
        &[2.0, 1.5, 1.2],
        1,
    )
    .unwrap();
    run(
        "weight determinism",
        (0usize..9, -10.0f64..10.0),
        |(l, x)| {
            let w = ok(fam.weight(&idx(l as f64)))?;
            prop_assert_eq!(w.eval(&[x]).to_bits(), w.eval(&[x]).to_bits());
            let g = ok(gs.weight(&idx(1.5)))?;
            prop_assert_eq!(g.eval(&[x]).to_bits(), g.eval(&[x]).to_bits());
            Ok(())
        },
    )
}

pub fn polynomial_weight_monotone() -> Result<(), String> {
    let fam = poly_family();
    run(
        "polynomial monotone",
        (0usize..9, 0usize..9, -10.0f64..10.0),
        |(a, b, x)| {
            let (lo, hi) = (a.min(b) as f64, a.max(b) as f64);
            let m_lo = ok(fam.weight(&idx(lo)))?.eval(&[x]);
            let m_hi = ok(fam.weight(&idx(hi)))?.eval(&[x]);
            prop_assert!(m_lo <= m_hi, "M_{lo}({x}) = {m_lo} > M_{hi}({x}) = {m_hi}");
            Ok(())
        },
    )
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn multiindex_count_is_binomial() -> Result<(), String> {
    run("multi-index count", (1usize..5, 0usize..7), |(k, m)| {
        let expected = binomial((m + k) as u128, k as u128);
        prop_assert_eq!(enumerate_multiindices(k, m).len() as u128, expected);
        prop_assert_eq!(multiindex_count(k, m), expected);
        Ok(())
    })
}

pub fn quadrature_cubic_exact() -> Result<(), String> {
    let strategy = (
        prop::array::uniform4(-3.0f64..3.0),
        -4.0f64..0.0,
        0.5f64..4.0,
        3usize..80,
    );
    run("cubic quadrature", strategy, |(c, lo, width, n)| {
        let hi = lo + width;
        let grid = ok(Grid::line(lo, hi, n))?;
        let got = ok(integrate(&grid, |x| {
            c[0] + c[1] * x[0] + c[2] * x[0].powi(2) + c[3] * x[0].powi(3)
        }))?;
        let prim = |x: f64| {
            c[0] * x + c[1] * x.powi(2) / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0
        };
        let exact = prim(hi) - prim(lo);
        let scale: f64 = (0..4)
            .map(|i| c[i].abs() * lo.abs().max(hi.abs()).powi(i as i32))
            .sum::<f64>()
            * width;
        prop_assert!(
            (got - exact).abs() <= 1e-13 * scale.max(exact.abs()),
            "{got} vs {exact}"
        );
        Ok(())
    })
}

pub fn exact_derivatives_compose() -> Result<(), String> {
    let grid = Grid::cube(2, -2.0, 2.0, 21).unwrap();
    let strategy = (-1.0f64..1.0, 0.2f64..1.5, prop::array::uniform4(0usize..3));
    run("derivative composition", strategy, |(a, s, o)| {
        let f: SmoothRef<f64, f64> = Arc::new(JetSmooth::new(2, move |x: &[Jet<f64>]| {
            let r2 = &(&x[0] * &x[0]) + &(&x[1] * &x[1]).scale(s);
            &(-r2).exp() * &x[0].clone().add_scalar(a)
        }));
        let sf = ok(SampledFunction::from_smooth(grid.clone(), f))?;
        let mu = MultiIndex::new(vec![o[0], o[1]]);
        let nu = MultiIndex::new(vec![o[2], o[3]]);
        let sum = MultiIndex::new(vec![o[0] + o[2], o[1] + o[3]]);
        let twice = ok(ok(sf.partial_derivative(&mu))?.partial_derivative(&nu))?;
        let once = ok(sf.partial_derivative(&sum))?;
        for (p, q) in twice.values().iter().zip(once.values()) {
            prop_assert_eq!(p.to_bits(), q.to_bits());
        }
        Ok(())
    })
}

pub fn mollifier_mass_and_support() -> Result<(), String> {
    run(
        "mollifier",
        (0.05f64..3.0, -1.0f64..1.0, -1.0f64..1.0),
        |(r, u, v)| {
            let m = ok(Mollifier::<f64>::new(1, r))?;
            let grid = ok(Grid::line(-r, r, 401))?;
            let mass = ok(integrate(&grid, |x| m.value_at(x)))?;
            prop_assert!((mass - 1.0).abs() <= 1e-10, "mass {mass}");
            let m2 = ok(Mollifier::<f64>::new(2, r))?;
            let x = [u * 2.0 * r, v * 2.0 * r];
            if (x[0] * x[0] + x[1] * x[1]).sqrt() >= r {
                prop_assert_eq!(m2.value_at(&x), 0.0);
            }
            Ok(())
        },
    )
}

fn coefficients() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 5)
}

pub fn seminorm_homogeneity() -> Result<(), String> {
    let grid = Grid::line(-8.0, 8.0, 161).unwrap();
    let basis = hermite_basis(&grid, 5);
    let cgrid = Grid::cube(2, -3.0, 3.0, 31).unwrap();
    let cbasis = entire_basis(&cgrid);
    let fam = poly_family();
    let efam = exp_family();
    let strategy = (
        coefficients(),
        prop::collection::vec(-2.0f64..2.0, 6),
        -1e3f64..1e3,
        0usize..3,
    );
    run("homogeneity", strategy, |(c, d, s, m)| {
        let f = combine(&basis, &c);
        let sf = f.scaled(s);
        let g = idx(1.0);
        let pairs = [
            (
                ok(sup_seminorm(&f, &fam, &g, m))?.value,
                ok(sup_seminorm(&sf, &fam, &g, m))?.value,
            ),
            (
                ok(lp_seminorm(&f, &fam, &g, m, 2.0))?.value,
                ok(lp_seminorm(&sf, &fam, &g, m, 2.0))?.value,
            ),
        ];
        let h = combine_complex(&cbasis, &d);
        let sd: Vec<f64> = d.iter().map(|v| v * s).collect();
        let sh = combine_complex(&cbasis, &sd);
        let a = idx(1.0);
        let apairs = [
            (
                ok(analytic_sup_seminorm(&h, &efam, &a))?.value,
                ok(analytic_sup_seminorm(&sh, &efam, &a))?.value,
            ),
            (
                ok(analytic_lp_seminorm(&h, &efam, &a, 1.5))?.value,
                ok(analytic_lp_seminorm(&sh, &efam, &a, 1.5))?.value,
            ),
        ];
        for (x, y) in pairs.iter().chain(&apairs) {
            prop_assert!(close(s.abs() * x, *y, 1e-12), "{} * {x} vs {y}", s.abs());
        }
        Ok(())
    })
}

pub fn seminorm_triangle() -> Result<(), String> {
    let grid = Grid::line(-8.0, 8.0, 161).unwrap();
    let basis = hermite_basis(&grid, 5);
    let fam = poly_family();
    run(
        "triangle",
        (coefficients(), coefficients(), 0usize..3, 1.0f64..4.0),
        |(a, b, m, p)| {
            let (f, g) = (combine(&basis, &a), combine(&basis, &b));
            let fg = ok(f.sum(&g))?;
            let l = idx(2.0);
            let s = |h: &SampledFunction<f64>| sup_seminorm(h, &fam, &l, m).map(|v| v.value);
            prop_assert!(ok(s(&fg))? <= ok(s(&f))? + ok(s(&g))? + 1e-12);
            let q = |h: &SampledFunction<f64>| lp_seminorm(h, &fam, &l, m, p).map(|v| v.value);
            prop_assert!(ok(q(&fg))? <= ok(q(&f))? + ok(q(&g))? + 1e-12);
            Ok(())
        },
    )
}

pub fn seminorm_monotone_in_m() -> Result<(), String> {
    let grid = Grid::line(-8.0, 8.0, 161).unwrap();
    let basis = hermite_basis(&grid, 5);
    let fam = poly_family();
    run(
        "order monotone",
        (coefficients(), 0usize..3, 0usize..3, 0usize..5),
        |(c, a, b, l)| {
            let f = combine(&basis, &c);
            let (lo, hi) = (a.min(b), a.max(b));
            let g = idx(l as f64);
            prop_assert!(
                ok(sup_seminorm(&f, &fam, &g, lo))?.value
                    <= ok(sup_seminorm(&f, &fam, &g, hi))?.value
            );
            prop_assert!(
                ok(lp_seminorm(&f, &fam, &g, lo, 2.0))?.value
                    <= ok(lp_seminorm(&f, &fam, &g, hi, 2.0))?.value
            );
            Ok(())
        },
    )
}

pub fn seminorm_monotone_in_weight() -> Result<(), String> {
    let grid = Grid::line(-8.0, 8.0, 161).unwrap();
    let basis = hermite_basis(&grid, 5);
    let fam = poly_family();
    run(
        "weight monotone",
        (coefficients(), 0usize..9, 0usize..9, 0usize..3),
        |(c, a, b, m)| {
            let f = combine(&basis, &c);
            let (lo, hi) = (idx(a.min(b) as f64), idx(a.max(b) as f64));
            prop_assert!(
                ok(sup_seminorm(&f, &fam, &lo, m))?.value
                    <= ok(sup_seminorm(&f, &fam, &hi, m))?.value
            );
            prop_assert!(
                ok(lp_seminorm(&f, &fam, &lo, m, 3.0))?.value
                    <= ok(lp_seminorm(&f, &fam, &hi, m, 3.0))?.value
            );
            Ok(())
        },
    )
}

pub fn verdict_scale_invariance() -> Result<(), String> {
    let grid = Grid::line(-8.0, 8.0, 321).unwrap();
    let basis = hermite_basis(&grid, 5);
    let fam = poly_family();
    let strategy = (
        coefficients(),
        prop::sample::select(vec![1e-6, 1e6]),
        0usize..2,
        0usize..2,
    );
    run("scale invariance", strategy, |(c, s, l, m)| {
        let f = vec![combine(&basis, &c)];
        let big = vec![f[0].scaled(s)];
        let g = idx(l as f64);
        let a = ok(verify_norm_equivalence(
            &fam,
            &g,
            m,
            2.0,
            &f,
            EquivalenceOptions::default(),
        ))?;
        let b = ok(verify_norm_equivalence(
            &fam,
            &g,
            m,
            2.0,
            &big,
            EquivalenceOptions::default(),
        ))?;
        prop_assert_eq!(a.passed, b.passed);
        prop_assert_eq!(a.entries[0].forward.passed, b.entries[0].forward.passed);
        Ok(())
    })
}

fn gaussian_kernel() -> TwoVariableFunction<f64> {
    let g = Grid::line(-3.0, 3.0, 31).unwrap();
    TwoVariableFunction::from_kernel(KernelFn::GaussianDifference { k: 1 }, g.clone(), g).unwrap()
}

pub fn functional_bilinearity() -> Result<(), String> {
    let h = gaussian_kernel();
    let ys = h.y_grid().clone();
    let node = move |i: usize| ys.point(i);
    let strategy = (
        0usize..31,
        0usize..31,
        0usize..31,
        -5.0f64..5.0,
        -5.0f64..5.0,
        -1.0f64..1.0,
    );
    run("bilinearity", strategy, |(i, j, k, a, b, w)| {
        let v1 = ok(DiscreteFunctional::combination(vec![
            (node(i), 1.0),
            (node(j), w),
        ]))?;
        let v2 = DiscreteFunctional::delta(node(k));
        let both = ok(v1.linear_combination(a, &v2, b))?;
        let lhs = ok(apply_functional(&h, &both, false))?;
        let f1 = ok(apply_functional(&h, &v1, false))?;
        let f2 = ok(apply_functional(&h, &v2, false))?;
        for (n, &l) in lhs.function.values().iter().enumerate() {
            let r = a * f1.function.values()[n] + b * f2.function.values()[n];
            prop_assert!(
                (l - r).abs() <= 1e-13 * (1.0 + a.abs() + b.abs()),
                "{l} vs {r}"
            );
        }
        Ok(())
    })
}

pub fn delta_image_is_column() -> Result<(), String> {
    let h = gaussian_kernel();
    run("delta column", (0usize..31, 0usize..31), |(j, i)| {
        let y = h.y_grid().point(j);
        let img = ok(apply_functional(&h, &DiscreteFunctional::delta(y), false))?;
        let column = h.column(j);
        prop_assert_eq!(img.function.values(), column.as_slice());
        let x = h.x_grid().point(i);
        let s = ok(slice(&h, &x))?;
        prop_assert_eq!(s.values(), h.row(i));
        Ok(())
    })
}

fn random_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, rows * cols)
}

pub fn residual_monotone() -> Result<(), String> {
    let strategy =
        (3usize..12, 3usize..12).prop_flat_map(|(r, c)| (Just(r), Just(c), random_matrix(r, c)));
    run("residual monotone", strategy, |(r, c, v)| {
        let h = ok(TwoVariableFunction::from_values(
            ok(Grid::line(0.0, 1.0, r))?,
            ok(Grid::line(0.0, 1.0, c))?,
            v,
        ))?;
        let one = WeightFunction::constant(1, 1.0);
        let w = WeightFunction::polynomial(1, 1.0);
        let rep = ok(density_decay_report(
            &h,
            &one,
            &w,
            r.min(c),
            Default::default(),
        ))?;
        prop_assert!(rep.monotone);
        for pair in rep.rows.windows(2) {
            prop_assert!(pair[1].residual <= pair[0].residual);
        }
        Ok(())
    })
}

pub fn svd_optimality() -> Result<(), String> {
    let strategy = (4usize..21, 4usize..21).prop_flat_map(|(r, c)| {
        (
            Just(r),
            Just(c),
            random_matrix(r, 3),
            random_matrix(3, c),
            random_matrix(r, c),
            random_matrix(r, 3),
        )
    });
    run("svd optimality", strategy, |(r, c, a, b, noise, cand)| {
        let xg = ok(Grid::line(-1.0, 1.0, r))?;
        let yg = ok(Grid::line(0.0, 2.0, c))?;
        let low: Vec<f64> = (0..r * c)
            .map(|n| (0..3).map(|t| a[(n / c) * 3 + t] * b[t * c + n % c]).sum())
            .collect();
        let wx = WeightFunction::polynomial(1, 1.0);
        let wy = WeightFunction::constant(1, 2.0);
        let h = ok(TwoVariableFunction::from_values(
            xg.clone(),
            yg.clone(),
            low.clone(),
        ))?;
        prop_assert!(ok(separable_approx(&h, &wx, &wy, 3))?.residual <= 1e-10);

        let full: Vec<f64> = low.iter().zip(&noise).map(|(l, n)| l + n).collect();
        let h = ok(TwoVariableFunction::from_values(xg, yg, full))?;
        let best = ok(separable_approx(&h, &wx, &wy, 3))?;
        let g: Vec<f64> = (0..r * c)
            .map(|n| {
                (0..3)
                    .map(|t| cand[(n / c) * 3 + t] * b[t * c + n % c])
                    .sum()
            })
            .collect();
        let d = ok(weighted_distance(&h, &g, &wx, &wy))?;
        prop_assert!(
            d >= best.residual * (1.0 - 1e-12),
            "{d} < {}",
            best.residual
        );
        let d_best = ok(weighted_distance(&h, &best.reconstruct(), &wx, &wy))?;
        prop_assert!(
            close(d_best, best.residual, 1e-8) || d_best < 1e-12,
            "{d_best} vs {}",
            best.residual
        );
        Ok(())
    })
}

pub fn report_determinism() -> Result<(), String> {
    let grid = Grid::line(-10.0, 10.0, 201).unwrap();
    run("determinism", (0usize..4, 1.0f64..3.0), |(which, p)| {
        let fam = match which {
            0 => poly_family(),
            1 => make_family(
                WeightKind::GelfandShilovExp,
                &[1.0, 1.0],
                &[2.0, 1.5, 1.2],
                1,
            )
            .unwrap(),
            2 => make_family(
                WeightKind::IndicatorBox,
                &[],
                &(1..=11).map(f64::from).collect::<Vec<_>>(),
                1,
            )
            .unwrap(),
            _ => make_family(WeightKind::Polynomial, &[], &[0.0, 1.0, 2.0], 1).unwrap(),
        };
        let a = ok(check_family(&fam, &grid, p, 8, DecayOptions::default()))?;
        let b = ok(check_family(&fam, &grid, p, 8, DecayOptions::default()))?;
        prop_assert_eq!(
            ok(serde_json::to_string(&a))?,
            ok(serde_json::to_string(&b))?
        );
        Ok(())
    })
}
