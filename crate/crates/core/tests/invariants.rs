use duality_core::exactnum::{eig_sorted, Matrix, Rational, Scalar, C64};
use duality_core::io::{lax_from_json, lax_to_json, point_from_json, point_to_json};
use duality_core::manybody::{moment_residual, ModelKind, PhasePoint};
use duality_core::spectral_duality::{compare_curves, dual_of};
use duality_core::spectral_models::{cybe_residual, gauge_matrix, gauge_matrix_recursive, MultiPoleLax, RVariant, SpectralKind};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=30).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn distinct(n: usize, nonzero: bool) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::btree_set((-40i64..=40, 1i64..=9), n..=n)
        .prop_map(|s| s.into_iter().map(|(a, b)| Rational::from_ratio(a, b)).collect::<Vec<_>>())
        .prop_filter("distinct and nonzero", move |v: &Vec<Rational>| {
            let mut w = v.clone();
            w.sort_by(|a, b| a.partial_cmp(b).unwrap());
            w.dedup();
            w.len() == v.len() && (!nonzero || v.iter().all(|x| !x.is_zero()))
        })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(rational(), rows * cols)
        .prop_map(move |v| Matrix::from_fn(rows, cols, |i, j| v[i * cols + j].clone()))
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn point() -> impl Strategy<Value = (ModelKind, PhasePoint<Rational>)> {
    (kind(), 1usize..=4)
        .prop_flat_map(|(k, n)| {
            let q = distinct(n, k.multiplicative_positions());
            let p = proptest::collection::vec(rational(), n);
            (Just(k), q, p, rational())
        })
        .prop_filter_map("generic point", |(k, q, p, nu)| {
            let x = PhasePoint::new(q, p, nu).ok()?;
            x.validate(k).is_ok().then_some((k, x))
        })
}

fn multipole() -> impl Strategy<Value = MultiPoleLax<Rational>> {
    (prop::sample::select(SpectralKind::ALL.to_vec()), 1usize..=3, 1usize..=3)
        .prop_flat_map(|(k, n, m)| {
            let nz = k.weighted() || k.chain();
            (Just(k), distinct(n, nz), distinct(m, nz), matrix(n, m), matrix(m, n))
        })
        .prop_map(|(k, t, z, xi, eta)| MultiPoleLax::new(k, t, z, xi, eta).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moment_map_vanishes_exactly((k, x) in point()) {
        prop_assert!(moment_residual(k, &x).unwrap().is_zero());
    }

    #[test]
    fn gauge_closed_form_matches_recursion(
        (lambda, xi, eta) in (1usize..=5, 1usize..=3).prop_flat_map(|(n, m)| (distinct(n, false), matrix(n, m), matrix(m, n)))
    ) {
        let n = lambda.len();
        let s_lower = (&xi * &eta).strictly_lower();
        let g = gauge_matrix(&lambda, &xi, &eta).unwrap();
        prop_assert_eq!(&g, &gauge_matrix_recursive(&lambda, &s_lower).unwrap());
        let big = &Matrix::from_diag(&lambda) + &s_lower;
        let lhs = &g.inverse().unwrap() * &(&big * &g);
        prop_assert_eq!(lhs, Matrix::from_diag(&lambda));
        prop_assert_eq!(g.rows(), n);
    }

    #[test]
    fn dual_curves_coincide(l in multipole()) {
        prop_assume!(l.kind != SpectralKind::XxxChain);
        let d = dual_of(&l).unwrap();
        let cmp = compare_curves(&l, &d).unwrap();
        prop_assert_eq!(cmp.max_diff, 0.0);
        prop_assert_eq!(cmp.original, cmp.dual_swapped);
    }

    #[test]
    fn classical_yang_baxter_holds(
        variant in prop::sample::select(vec![RVariant::XxzMultiplicative, RVariant::Twisted]),
        n in 1usize..=3,
        z in distinct(3, true),
    ) {
        let r = cybe_residual(variant, n, [&z[0], &z[1], &z[2]]).unwrap();
        prop_assert!(r.is_zero());
    }

    #[test]
    fn eigen_decomposition_residual(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=36)) {
        let n = (v.len() as f64).sqrt() as usize;
        let a = Matrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1));
        let e = eig_sorted(&a).unwrap();
        let lhs = &a * &e.vectors;
        let rhs = e.vectors.diag_mul_right(&e.values);
        prop_assert!((&lhs - &rhs).frobenius() <= 1e-9 * a.frobenius().max(1.0));
    }

    #[test]
    fn descriptors_roundtrip((k, x) in point(), l in multipole()) {
        let (k2, y) = point_from_json::<Rational>(&point_to_json(k, &x)).unwrap();
        prop_assert_eq!(k2, k);
        prop_assert_eq!(y, x);
        prop_assert_eq!(lax_from_json::<Rational>(&lax_to_json(&l)).unwrap(), l);
    }
}
