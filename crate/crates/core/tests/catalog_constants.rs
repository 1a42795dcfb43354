//! Declared constants of the benchmark problems against an independent
//! dense eigen/SVD oracle, plus sampled verification.

use gvi_core::catalog::{self, verify_monotone_couple};
use gvi_core::rng::{self, DEFAULT_SEED};
use gvi_core::{Constant, Vector};
use nalgebra::DMatrix;

fn dm(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

fn declared(c: Constant<f64>) -> f64 {
    c.value().expect("declared constant")
}

#[test]
fn example2_constants_match_dense_oracle() {
    let p = catalog::example2::<f64>();
    let a = dm(&catalog::example2_matrix());
    let inv = dm(&catalog::example2_inverse());
    assert!((&a * &inv - DMatrix::identity(3, 3)).abs().max() < 1e-15);
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    let couple = p.couple();
    assert!((declared(couple.a.strong_monotonicity()) - lo).abs() < 1e-12);
    assert!((declared(couple.a.lipschitz()) - hi).abs() < 1e-12);
    let svd = inv.svd(false, false).singular_values.max();
    assert!((declared(couple.f.lipschitz()) - svd).abs() < 1e-12);
    assert!((svd - 1.0 / lo).abs() < 1e-12);
}

#[test]
fn example3_spectral_norm_matches_svd() {
    for n in [1, 2, 3, 5, 10, 20] {
        let p = catalog::example3::<f64>(n).unwrap();
        let b = dm(&catalog::example3_matrix(n));
        let svd = b.svd(false, false).singular_values.max();
        assert!((declared(p.couple().f.lipschitz()) - svd).abs() < 1e-10, "n={n}");
        assert_eq!(declared(p.couple().a.lipschitz()), n as f64);
        assert_eq!(declared(p.couple().a.strong_monotonicity()), 1.0);
    }
}

#[test]
fn example3_n2_entries_follow_case_formula() {
    let b = catalog::example3_matrix::<f64>(2);
    // (1/4) [[0, 3], [-1.5, 0]]: b_21 = -1 (2 + 1) / 2.
    assert_eq!(b, vec![vec![0.0, 0.75], vec![-0.375, 0.0]]);
}

#[test]
fn example3_couple_product_vanishes() {
    let p = catalog::example3::<f64>(7).unwrap();
    let mut g = rng::seeded(3);
    for _ in 0..1000 {
        let x: Vector<f64> = rng::in_ball(&mut g, 7, 3.0);
        let ax = p.couple().a.apply(&x).unwrap();
        let fx = p.couple().f.apply(&x).unwrap();
        assert!(ax.dot(&fx).abs() < 1e-12);
    }
}

#[test]
fn every_catalog_entry_verifies_and_certifies_its_reference() {
    for id in ["example1:m=3,N=20", "example1:m=3,N=5", "example2", "example3:n=1", "example3:n=10", "synthetic:diag=1,2,3", "shifted"] {
        let entry = catalog::lookup::<f64>(id).unwrap();
        let report = verify_monotone_couple(&entry.problem, 1000, 2.0, DEFAULT_SEED).unwrap();
        assert!(report.passed(), "{id}: {report:?}");
        let r = entry.problem.reference().unwrap();
        assert!(entry.problem.fixed_point_residual(1.0, r).unwrap() <= 1e-12, "{id}");
    }
}

#[test]
fn example1_solution_set_and_off_set_points() {
    let p = catalog::example1::<f64>(3, 5).unwrap();
    let mut g = rng::seeded(11);
    for _ in 0..100 {
        let d: Vector<f64> = rng::unit_direction(&mut g, 1);
        let on = Vector::new(vec![0.0, 0.0, 5.0 * d[0], 0.0, 0.0]).unwrap();
        assert!(p.fixed_point_residual(1.0, &on).unwrap() <= 1e-12);
        let off: Vector<f64> = rng::unit_direction(&mut g, 5);
        assert!(p.fixed_point_residual(1.0, &off).unwrap() > 1e-6);
    }
}

#[test]
fn unit_vectors_are_not_solutions_of_examples_2_and_3() {
    let mut g = rng::seeded(5);
    let p2 = catalog::example2::<f64>();
    let p3 = catalog::example3::<f64>(4).unwrap();
    for _ in 0..200 {
        assert!(p2.fixed_point_residual(1.0, &rng::unit_direction(&mut g, 3)).unwrap() > 0.0);
        assert!(p3.fixed_point_residual(1.0, &rng::unit_direction(&mut g, 4)).unwrap() > 0.0);
    }
}
