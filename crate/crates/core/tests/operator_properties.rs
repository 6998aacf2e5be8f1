mod common;

use proptest::prelude::*;
use singular_cones::linalg::SymMatrix;
use singular_cones::operators::{pucci_minus, pucci_plus, EllipticityParams, OperatorSpec};

fn sym(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0..3.0f64, n * n).prop_map(move |v| {
        SymMatrix::from_fn(n, |i, j| if i <= j { v[i * n + j] } else { v[j * n + i] })
    })
}

fn params() -> impl Strategy<Value = EllipticityParams> {
    (0.1..2.0f64, 1.0..5.0f64, 0.0..3.0f64)
        .prop_map(|(l, ratio, mu)| EllipticityParams::new(l, l * ratio, mu).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
        .prop_filter("nonzero", |x| x.iter().map(|a| a * a).sum::<f64>() > 1e-2)
}

proptest! {
    #[test]
    fn pucci_chain(p in params(), (m, k) in (2usize..6).prop_flat_map(|n| (sym(n), sym(n)))) {
        let n = m.dim();
        let s = SymMatrix::from_fn(n, |i, j| m.get(i, j) + k.get(i, j));
        let chain = [
            pucci_minus(&m, &p) + pucci_minus(&k, &p),
            pucci_minus(&s, &p),
            pucci_minus(&m, &p) + pucci_plus(&k, &p),
            pucci_plus(&s, &p),
            pucci_plus(&m, &p) + pucci_plus(&k, &p),
        ];
        for w in chain.windows(2) {
            prop_assert!(w[1] - w[0] >= -1e-12, "{chain:?}");
        }
    }

    #[test]
    fn homogeneity_and_dilation(
        seed in any::<u64>(),
        t in 0.0..10.0f64,
        r in 0.2..5.0f64,
        (m, p, x) in (2usize..5).prop_flat_map(|n| (sym(n), point(n), point(n))),
    ) {
        let n = m.dim();
        let mut rng = common::rng(seed);
        for spec in common::all_specs(&mut rng, n) {
            let f = spec.evaluate(&m, &p, &x).unwrap();
            let tp: Vec<f64> = p.iter().map(|a| t * a).collect();
            let ft = spec.evaluate(&m.scaled(t), &tp, &x).unwrap();
            prop_assert!((ft - t * f).abs() <= 1e-10 * (1.0 + (t * f).abs()), "{spec:?}");
            let rp: Vec<f64> = p.iter().map(|a| r * a).collect();
            let rx: Vec<f64> = x.iter().map(|a| r * a).collect();
            let lhs = spec.evaluate(&m.scaled(r * r), &rp, &x).unwrap();
            let rhs = r * r * spec.evaluate(&m, &p, &rx).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{spec:?}");
        }
    }

    #[test]
    fn zero_jet_gives_zero(seed in any::<u64>(), (n, x) in (2usize..6).prop_flat_map(|n| (Just(n), point(n)))) {
        let mut rng = common::rng(seed);
        for spec in common::all_specs(&mut rng, n) {
            let v = spec.evaluate(&SymMatrix::zeros(n), &vec![0.0; n], &x).unwrap();
            prop_assert!(v.abs() <= 1e-14, "{spec:?}: {v}");
        }
    }

    #[test]
    fn dual_of_extremal_minus_is_extremal_plus(
        p in params(),
        (m, g, x) in (2usize..5).prop_flat_map(|n| (sym(n), point(n), point(n))),
    ) {
        let minus = OperatorSpec::ExtremalMinus(p);
        let plus = OperatorSpec::ExtremalPlus(p);
        let a = minus.dual().evaluate(&m, &g, &x).unwrap();
        let b = plus.evaluate(&m, &g, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

#[test]
fn random_instance_suites() {
    assert!(common::chain_slack(2000, 1) >= -1e-12);
    assert!(common::rotation_defect(2000, 2) <= 1e-10);
    assert!(common::ellipticity_slack(200, 3) >= -1e-12);
    assert!(common::sandwich_slack(200, 4) >= -1e-12);
    assert!(common::dual_defect(200, 5) <= 1e-10);
    assert!(common::involution_defect(200, 6) <= 1e-10);
    assert!(common::oracle_excess(50, 200, 7) <= 1e-12);
    assert!(common::linear_family_excess(2000, 8) <= 1e-12);
}
