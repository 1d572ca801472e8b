//! Worked examples and cross-checks against independent computations.

use duality_core::cc_duality::{schlesinger_connection, verify_cc_identifications};
use duality_core::exactnum::{char_poly, eig_sorted, rank_one_factor, Matrix, Rational, Scalar, C64};
use duality_core::flows::{evolve_gaudin, evolve_manybody};
use duality_core::generate::{exact_multipole, exact_point, exact_trig_gaudin, rng_for};
use duality_core::manybody::{hamiltonian, lax, moment_residual, ModelKind, PhasePoint};
use duality_core::pq_duality::{dualize, dualize_cms_to_rrs, dualize_rational_cm, dualize_trig_rs};
use duality_core::spectral_duality::{
    dual_of, dual_rational_gaudin, dual_xxz_chain, factor_swap_dets, fictitious_gauge, fictitious_pole_sum, spectral_poly,
};
use duality_core::spectral_models::{MultiPoleLax, PoleSum, SpectralKind};

fn r(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn m(rows: Vec<Vec<Rational>>) -> Matrix<Rational> {
    Matrix::from_rows(rows).unwrap()
}

/// Determinant by Laplace expansion along the first row.
fn cofactor_det<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.rows();
    if n == 0 {
        return T::one();
    }
    let mut acc = T::zero();
    for j in 0..n {
        let minor = Matrix::from_fn(n - 1, n - 1, |i, k| a[(i + 1, if k < j { k } else { k + 1 })].clone());
        let term = a[(0, j)].clone() * cofactor_det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn lambda_minus<T: Scalar>(lambda: &T, a: &Matrix<T>) -> Matrix<T> {
    &Matrix::identity(a.rows()).scale(lambda) - a
}

#[test]
fn char_poly_matches_cofactor_expansion() {
    let mut rng = rng_for(11, "charpoly-oracle", 0);
    for n in 1..=5 {
        let a = exact_multipole(SpectralKind::RationalGaudin, n, n, &mut rng).xi;
        let p = char_poly(&a).unwrap();
        for x in -3..=3 {
            let x = q(x, 2);
            assert_eq!(p.eval(&x), cofactor_det(&lambda_minus(&x, &a)));
        }
    }
}

#[test]
fn two_by_two_char_poly_and_spectrum() {
    let a = m(vec![vec![r(2), r(-1)], vec![r(1), r(3)]]);
    assert_eq!(char_poly(&a).unwrap().coeffs, vec![r(1), r(-5), r(7)]);
    assert_eq!(char_poly(&Matrix::<Rational>::zeros(2, 2)).unwrap().coeffs, vec![r(1), r(0), r(0)]);
    let e = eig_sorted(&a.to_c64()).unwrap();
    let s = 3f64.sqrt() / 2.0;
    assert!((e.values[0] - c(2.5, -s)).norm() < 1e-14);
    assert!((e.values[1] - c(2.5, s)).norm() < 1e-14);
}

#[test]
fn eigen_decomposition_residual_on_random_complex_matrix() {
    let mut rng = rng_for(3, "eig-oracle", 0);
    let a = exact_multipole(SpectralKind::RationalGaudin, 6, 6, &mut rng);
    let b = Matrix::from_fn(6, 6, |i, j| c(a.xi[(i, j)].to_c64().re, a.eta[(i, j)].to_c64().re));
    let e = eig_sorted(&b).unwrap();
    let lhs = &b * &e.vectors;
    let rhs = e.vectors.diag_mul_right(&e.values);
    assert!((&lhs - &rhs).frobenius() <= 1e-9 * b.frobenius());
}

#[test]
fn rank_one_factorization_example() {
    let (xi, eta) = rank_one_factor(&m(vec![vec![r(1), r(2)], vec![r(3), r(6)]]), 0.0).unwrap();
    assert_eq!(xi, vec![q(1, 3), r(1)]);
    assert_eq!(eta, vec![r(3), r(6)]);
    assert!(rank_one_factor(&Matrix::<Rational>::identity(2), 0.0).is_err());
}

#[test]
fn lax_matrix_examples() {
    let cm = PhasePoint::new(vec![r(0), r(1)], vec![r(2), r(3)], r(1)).unwrap();
    assert_eq!(lax(ModelKind::RationalCm, &cm).unwrap(), m(vec![vec![r(2), r(-1)], vec![r(1), r(3)]]));
    assert_eq!(hamiltonian(ModelKind::RationalCm, &cm).unwrap(), q(11, 2));
    assert!(moment_residual(ModelKind::RationalCm, &cm).unwrap().is_zero());

    let rs = PhasePoint::new(vec![r(0), r(2)], vec![r(1), r(1)], r(1)).unwrap();
    let l = lax(ModelKind::RationalRs, &rs).unwrap();
    assert_eq!(l, m(vec![vec![q(3, 2), q(-1, 2)], vec![q(1, 2), q(1, 2)]]));
    assert_eq!(hamiltonian(ModelKind::RationalRs, &rs).unwrap(), r(2));
    assert!(moment_residual(ModelKind::RationalRs, &rs).unwrap().is_zero());

    let cms = PhasePoint::new(vec![r(1), r(2)], vec![r(0), r(0)], r(1)).unwrap();
    assert_eq!(lax(ModelKind::TrigCms, &cms).unwrap(), m(vec![vec![r(0), r(2)], vec![r(-1), r(0)]]));
}

#[test]
fn rational_cm_dual_example() {
    let x = PhasePoint::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(3.0, 0.0)], c(1.0, 0.0)).unwrap();
    let d = dualize_rational_cm(&x).unwrap();
    let s = 3f64.sqrt() / 2.0;
    assert!((d.dual.q[0] - c(2.5, -s)).norm() < 1e-12);
    assert!((d.dual.q[1] - c(2.5, s)).norm() < 1e-12);
    assert!((d.dual.p[0] + d.dual.p[1] - c(1.0, 0.0)).norm() < 1e-12);
    assert_eq!(d.dual.coupling, c(-1.0, 0.0));
}

fn generic(kind: ModelKind, n: usize) -> PhasePoint<C64> {
    let qs = [c(-1.0, 0.1), c(0.3, -0.2), c(1.4, 0.15)];
    let ps = [c(0.2, 0.1), c(-0.6, 0.05), c(0.5, -0.1)];
    PhasePoint::from_additive(kind, &qs[..n], &ps[..n], c(0.6, 0.1)).unwrap()
}

#[test]
fn cms_dual_positions_sum_to_total_momentum() {
    let x = generic(ModelKind::TrigCms, 3);
    let d = dualize_cms_to_rrs(&x).unwrap();
    assert!(d.relative_residual() <= 1e-8);
    let lhs: C64 = d.dual.q.iter().sum();
    let rhs: C64 = x.p.iter().sum();
    assert!((lhs - rhs).norm() < 1e-10);
}

#[test]
fn trig_rs_determinant_is_product_of_dual_positions() {
    let x = generic(ModelKind::TrigRs, 3);
    let d = dualize_trig_rs(&x).unwrap();
    assert!(d.relative_residual() <= 1e-8);
    let det = lax(ModelKind::TrigRs, &x).unwrap().det().unwrap();
    let prod: C64 = d.dual.q.iter().product();
    assert!((det - prod).norm() < 1e-10 * det.norm().max(1.0));
}

#[test]
fn single_particle_maps_swap_coordinates() {
    let x = PhasePoint::new(vec![c(2.0, 0.0)], vec![c(0.5, 0.0)], c(0.3, 0.0)).unwrap();
    for kind in [ModelKind::TrigCms, ModelKind::TrigRs] {
        let d = dualize(kind, &x).unwrap();
        assert!((d.dual.q[0] - x.p[0]).norm() < 1e-15);
        assert!((d.dual.p[0] - x.q[0]).norm() < 1e-15);
    }
}

/// Cleared spectral polynomial checked against `det(λ - L(z)) ∏(z - z_k)`.
fn assert_curve_matches_determinant(l: &MultiPoleLax<Rational>) {
    let p = spectral_poly(l).unwrap();
    for (a, b) in [(q(1, 3), q(7, 5)), (r(-2), q(11, 4)), (q(5, 7), r(-9))] {
        if l.poles.contains(&b) {
            continue;
        }
        let mut direct = cofactor_det(&lambda_minus(&a, &l.evaluate(&b).unwrap()));
        for zk in &l.poles {
            direct = direct * (b.clone() - zk.clone());
        }
        assert_eq!(p.eval(&a, &b), direct, "{:?}", l.kind);
    }
}

#[test]
fn spectral_polynomials_match_cofactor_determinants() {
    for kind in SpectralKind::ALL {
        for n in 1..=3 {
            for mm in 1..=3 {
                let mut rng = rng_for(17, kind.name(), (n * 10 + mm) as u64);
                assert_curve_matches_determinant(&exact_multipole(kind, n, mm, &mut rng));
            }
        }
    }
}

fn scalar_lax(kind: SpectralKind, twist: Rational, pole: Rational, xi: Rational, eta: Rational) -> MultiPoleLax<Rational> {
    MultiPoleLax::new(kind, vec![twist], vec![pole], m(vec![vec![xi]]), m(vec![vec![eta]])).unwrap()
}

#[test]
fn scalar_curves() {
    // L(z) = 1/z clears to λz - 1
    let l = scalar_lax(SpectralKind::RationalGaudin, r(0), r(0), r(1), r(1));
    assert_eq!(l.evaluate(&r(3)).unwrap(), m(vec![vec![q(1, 3)]]));
    let p = spectral_poly(&l).unwrap();
    for (a, b) in [(r(2), r(3)), (q(1, 2), r(-5))] {
        assert_eq!(p.eval(&a, &b), a * b - r(1));
    }

    // (λ - λ₁)(z - z₁) - z₁ξη for the reduced trigonometric Gaudin model
    let (lam1, z1, xi, eta) = (q(2, 3), r(5), r(3), q(-1, 4));
    let p = spectral_poly(&scalar_lax(SpectralKind::TrigGaudinReduced, lam1.clone(), z1.clone(), xi.clone(), eta.clone())).unwrap();
    for (a, b) in [(r(2), r(3)), (q(1, 2), r(-7))] {
        let expected = (a.clone() - lam1.clone()) * (b.clone() - z1.clone()) - z1.clone() * xi.clone() * eta.clone();
        assert_eq!(p.eval(&a, &b), expected);
    }

    // (λ - v)(z - z₁) - v z₁ ξη for the XXZ chain
    let v = q(3, 2);
    let p = spectral_poly(&scalar_lax(SpectralKind::XxzChain, v.clone(), z1.clone(), xi.clone(), eta.clone())).unwrap();
    for (a, b) in [(r(2), r(3)), (q(1, 2), r(-7))] {
        let expected = (a.clone() - v.clone()) * (b.clone() - z1.clone()) - v.clone() * z1.clone() * xi.clone() * eta.clone();
        assert_eq!(p.eval(&a, &b), expected);
    }
}

#[test]
fn factor_swap_scalar_example() {
    let l = scalar_lax(SpectralKind::RationalGaudin, r(0), r(0), r(1), r(1));
    let (dn, dm) = factor_swap_dets(&l, &r(2), &r(3)).unwrap();
    assert_eq!(dn, dm);
    // det(λ - L(z))/det(λ - Λ) = (2 - 1/3)/2 and det(z - L̃(λ))/det(z - Z) = (3 - 1/2)/3
    assert_eq!(dn, q(5, 6));
    let d = dual_rational_gaudin(&l).unwrap();
    let lhs = (r(2) - l.evaluate(&r(3)).unwrap()[(0, 0)].clone()) / r(2);
    let rhs = (r(3) - d.evaluate(&r(2)).unwrap()[(0, 0)].clone()) / r(3);
    assert_eq!(lhs, q(5, 6));
    assert_eq!(rhs, q(5, 6));
}

#[test]
fn factor_swap_identity_on_random_instances() {
    for kind in [SpectralKind::RationalGaudin, SpectralKind::XxzChain] {
        let mut rng = rng_for(5, kind.name(), 0);
        let l = exact_multipole(kind, 2, 2, &mut rng);
        for (a, b) in [(q(1, 3), q(7, 5)), (r(-2), q(11, 4)), (q(5, 7), r(-9)), (r(100), q(1, 100)), (q(-3, 8), r(4))] {
            if l.twist.contains(&a) || l.poles.contains(&b) {
                continue;
            }
            let (dn, dm) = factor_swap_dets(&l, &a, &b).unwrap();
            assert_eq!(dn, dm);
        }
    }
}

#[test]
fn double_duals_return_the_original() {
    let mut rng = rng_for(9, "double-dual", 0);
    let g = exact_multipole(SpectralKind::RationalGaudin, 3, 2, &mut rng);
    assert_eq!(dual_rational_gaudin(&dual_rational_gaudin(&g).unwrap()).unwrap(), g);
    let x = exact_multipole(SpectralKind::XxzChain, 2, 3, &mut rng);
    let back = dual_xxz_chain(&dual_xxz_chain(&x).unwrap()).unwrap();
    assert_eq!(back, x);
    assert_eq!(back.size(), 2);
    let t = exact_trig_gaudin(2, 2, &mut rng).reduce().unwrap().lax;
    assert_eq!(dual_of(&t).unwrap().kind, SpectralKind::XxxChain);
}

#[test]
fn fictitious_lax_char_poly_example() {
    let x = PhasePoint::new(vec![r(0), r(1)], vec![r(2), r(3)], r(1)).unwrap();
    let s = fictitious_pole_sum(ModelKind::RationalCm, &x).unwrap();
    for z in [r(5), r(7)] {
        assert_eq!(char_poly(&s.evaluate(&z).unwrap()).unwrap().coeffs, vec![r(1), r(-5), r(7)]);
        assert_eq!(s.evaluate(&z).unwrap(), fictitious_gauge(ModelKind::RationalCm, &x, &z).unwrap());
    }
    for res in &s.residues {
        assert_eq!(res.max_two_by_two_minor(), 0.0);
    }
}

#[test]
fn schlesinger_residue_example() {
    let nu = q(3, 7);
    let x = PhasePoint::new(vec![r(0), r(1)], vec![r(2), r(3)], nu.clone()).unwrap();
    let s = schlesinger_connection(&x).unwrap();
    assert_eq!(s.residues[0], m(vec![vec![r(-1), r(0)], vec![-nu, r(0)]]));
}

#[test]
fn cc_identities_examples() {
    let x = PhasePoint::new(vec![r(0), r(1)], vec![r(2), r(3)], r(1)).unwrap();
    let rep = verify_cc_identifications(&x).unwrap();
    assert_eq!(rep.h0, q(11, 2));
    assert_eq!(rep.schlesinger.hamiltonians, vec![r(-2), r(-3)]);
    assert!(rep.all_hold());

    let one = PhasePoint::new(vec![q(1, 3)], vec![q(5, 2)], r(4)).unwrap();
    let rep = verify_cc_identifications(&one).unwrap();
    assert_eq!(rep.h0, q(25, 8));
    assert_eq!(rep.schlesinger.hamiltonians, vec![q(-5, 2)]);

    let free = PhasePoint::new(vec![r(0), r(2), r(5)], vec![r(1), r(-4), q(2, 3)], r(0)).unwrap();
    let rep = verify_cc_identifications(&free).unwrap();
    assert!(rep.all_hold());
}

#[test]
fn cc_identities_on_random_points() {
    for n in 2..=6 {
        let mut rng = rng_for(23, "cc-oracle", n as u64);
        let x = exact_point(ModelKind::RationalCm, n, &mut rng);
        assert!(verify_cc_identifications(&x).unwrap().all_hold(), "n = {n}");
    }
}

#[test]
fn free_motion_is_a_straight_line() {
    let x = PhasePoint::new(vec![c(0.0, 0.0), c(1.5, 0.0)], vec![c(0.7, 0.0), c(-0.2, 0.0)], c(0.0, 0.0)).unwrap();
    let f = evolve_manybody(ModelKind::RationalCm, &x, 1.0, 0.01, 10).unwrap();
    for i in 0..2 {
        assert!((f.final_point.q[i] - (x.q[i] + x.p[i])).norm() < 1e-12);
    }
}

#[test]
fn symmetric_point_keeps_center_of_mass() {
    let x = PhasePoint::new(vec![c(-1.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(1.0, 0.0)], c(0.0, 1.0)).unwrap();
    let f = evolve_manybody(ModelKind::RationalCm, &x, 1.0, 1e-3, 100).unwrap();
    let s: C64 = f.final_point.q.iter().sum();
    assert!(s.norm() < 1e-12);
    assert!(f.max_drift() < 1e-7);
}

fn gaudin_model(n: usize, mm: usize, seed: u64) -> PoleSum<C64> {
    let mut rng = rng_for(seed, "gaudin-oracle", 0);
    let l = exact_multipole(SpectralKind::RationalGaudin, n, mm, &mut rng).to_pole_sum();
    let sc = C64::new(0.05, 0.0);
    let mut s = l.map(|x| x.to_c64());
    for res in s.residues.iter_mut() {
        *res = res.scale(&sc);
    }
    s
}

#[test]
fn gaudin_flow_fixed_point_and_single_site() {
    let mut zero = gaudin_model(2, 2, 1);
    for res in zero.residues.iter_mut() {
        *res = Matrix::zeros(2, 2);
    }
    let f = evolve_gaudin(&zero, 0, 0.5, 0.01).unwrap();
    assert_eq!(f.final_model, zero);

    let one = gaudin_model(3, 1, 2);
    let f = evolve_gaudin(&one, 0, 0.5, 0.01).unwrap();
    let tr0 = one.residues[0].trace();
    assert!((f.final_model.residues[0].trace() - tr0).norm() < 1e-12);
}

#[test]
fn gaudin_flows_commute() {
    let model = gaudin_model(2, 3, 4);
    let (t, dt) = (0.05, 1e-3);
    let ab = evolve_gaudin(&evolve_gaudin(&model, 0, t, dt).unwrap().final_model, 1, t, dt).unwrap().final_model;
    let ba = evolve_gaudin(&evolve_gaudin(&model, 1, t, dt).unwrap().final_model, 0, t, dt).unwrap().final_model;
    let gap = ab
        .residues
        .iter()
        .zip(&ba.residues)
        .map(|(a, b)| a.max_diff(b))
        .fold(0.0, f64::max);
    assert!(gap <= 1e-6, "{gap}");
}
