mod common;

use common::{gaussian, rng, to_na};
use grassmann_rom::grassmann::{geodesic_distance, principal_angles, OrthonormalBasis};
use grassmann_rom::linalg::{qr_orthonormalize, solve_square, thin_svd, Matrix};
use grassmann_rom::Error;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

/// Singular values as square roots of the eigenvalues of `AᵀA`.
fn eigen_oracle(a: &Matrix) -> Vec<f64> {
    let ata = to_na(&a.transpose()) * to_na(a);
    let mut ev: Vec<f64> = SymmetricEigen::new(ata).eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(a.rows().min(a.cols()));
    ev
}

#[test]
fn svd_matches_eigendecomposition_of_gram() {
    let mut r = rng(11);
    let a = gaussian(6, 3, &mut r);
    let svd = thin_svd(&a).unwrap();
    let oracle = eigen_oracle(&a);
    for (s, o) in svd.sigma.iter().zip(&oracle) {
        assert!((s - o).abs() <= 1e-8 * oracle[0], "{s} vs {o}");
    }
    assert!((&a - &svd.reconstruct()).frobenius_norm() <= 1e-9 * a.frobenius_norm());
}

#[test]
fn svd_sign_convention_is_deterministic() {
    let mut r = rng(12);
    let a = gaussian(9, 4, &mut r);
    let s1 = thin_svd(&a).unwrap();
    let s2 = thin_svd(&a).unwrap();
    assert_eq!(s1.u, s2.u);
    assert_eq!(s1.v, s2.v);
    for j in 0..4 {
        let col = s1.u.column(j);
        let lead = col.iter().copied().fold(0.0_f64, |b, x| if x.abs() > b.abs() { x } else { b });
        assert!(lead >= 0.0);
    }
}

#[test]
fn qr_two_dimensional_gram_schmidt() {
    let a = Matrix::from_columns(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let q = qr_orthonormalize(&a).unwrap();
    assert!((&q.tr_matmul(&q) - &Matrix::identity(2)).max_abs() < 1e-15);
}

#[test]
fn qr_preserves_span() {
    let mut r = rng(13);
    let a = gaussian(100, 5, &mut r);
    let q = qr_orthonormalize(&a).unwrap();
    assert!(q.orthonormality_defect() <= 1e-12);
    // span(a) = span(q): the residual of a after projection onto q vanishes.
    let residual = &a - &q.matmul(&q.tr_matmul(&a));
    assert!(residual.frobenius_norm() <= 1e-12 * a.frobenius_norm());
    let qa = OrthonormalBasis::new(q.clone()).unwrap();
    let qq = OrthonormalBasis::new(qr_orthonormalize(&q).unwrap()).unwrap();
    assert!(principal_angles(&qa, &qq).unwrap().max() <= 1e-10);
    assert!(geodesic_distance(&qa, &qq).unwrap() <= 1e-10);
}

#[test]
fn qr_on_orthonormal_input_keeps_projector() {
    let mut r = rng(14);
    let a = qr_orthonormalize(&gaussian(12, 4, &mut r)).unwrap();
    let q = qr_orthonormalize(&a).unwrap();
    assert!((&q.matmul_tr(&q) - &a.matmul_tr(&a)).frobenius_norm() <= 1e-10);
}

#[test]
fn qr_names_dependent_column() {
    let a = Matrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![2.0, -3.0, 0.0]]).unwrap();
    match qr_orthonormalize(&a) {
        Err(Error::RankDeficient { column }) => assert_eq!(column, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn solve_matches_elimination_oracle() {
    let mut r = rng(15);
    let mut a = gaussian(8, 8, &mut r);
    for i in 0..8 {
        a[(i, i)] += 8.0;
    }
    let b = gaussian(8, 3, &mut r);
    let x = solve_square(&a, &b).unwrap();
    let oracle = to_na(&a).lu().solve(&to_na(&b)).unwrap();
    for i in 0..8 {
        for j in 0..3 {
            assert!((x[(i, j)] - oracle[(i, j)]).abs() <= 1e-12);
        }
    }
    assert!((&a.matmul(&x) - &b).frobenius_norm() <= 1e-9 * b.frobenius_norm());
}

fn small_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |d| Matrix::from_row_major(r, c, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_invariants(a in small_matrix()) {
        let svd = thin_svd(&a).unwrap();
        prop_assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.u.orthonormality_defect() <= 1e-10);
        prop_assert!(svd.v.orthonormality_defect() <= 1e-10);
        let res = (&a - &svd.reconstruct()).frobenius_norm();
        prop_assert!(res <= 1e-9 * a.frobenius_norm().max(1.0));
        let oracle = eigen_oracle(&a);
        for (s, o) in svd.sigma.iter().zip(&oracle) {
            prop_assert!((s - o).abs() <= 1e-8 * oracle[0].max(1.0));
        }
    }

    #[test]
    fn solve_recovers_planted_solution(seed in 0u64..1000, n in 1usize..=8) {
        let mut r = rng(seed);
        let mut a = gaussian(n, n, &mut r);
        for i in 0..n {
            a[(i, i)] += 3.0 * n as f64;
        }
        let x0 = gaussian(n, 2, &mut r);
        let x = solve_square(&a, &a.matmul(&x0)).unwrap();
        prop_assert!((&x - &x0).frobenius_norm() <= 1e-8 * x0.frobenius_norm());
    }
}
