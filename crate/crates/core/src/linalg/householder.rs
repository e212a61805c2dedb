use super::counters;
use super::matrix::{axpy, dot, Matrix};

/// Thin Householder QR of a tall matrix (`m ≥ n`): `a = q·r` with `q`
/// (m×n) orthonormal and `r` (n×n) upper triangular.
///
/// Unlike [`qr_orthonormalize`](super::qr_orthonormalize) this never fails:
/// rank-deficient input still yields an orthonormal `q`, with zeros on the
/// diagonal of `r` where columns are dependent.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    let (m, n) = a.shape();
    assert!(m >= n, "householder_qr needs a tall matrix, got {m}x{n}");
    let mut cols = a.to_columns();
    let mut reflectors: Vec<Option<(Vec<f64>, f64)>> = Vec::with_capacity(n);

    for k in 0..n {
        let x = &cols[k][k..];
        let norm = dot(x, x).sqrt();
        if norm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        if vv == 0.0 {
            reflectors.push(None);
            continue;
        }
        let beta = 2.0 / vv;
        for col in cols.iter_mut().skip(k) {
            let tail = &mut col[k..];
            let s = beta * dot(&v, tail);
            axpy(-s, &v, tail);
        }
        reflectors.push(Some((v, beta)));
    }

    let r = Matrix::from_fn(n, n, |i, j| if i <= j { cols[j][i] } else { 0.0 });

    let mut q_cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            e
        })
        .collect();
    for (k, refl) in reflectors.iter().enumerate().rev() {
        if let Some((v, beta)) = refl {
            for col in q_cols.iter_mut() {
                let tail = &mut col[k..];
                let s = beta * dot(v, tail);
                if s != 0.0 {
                    axpy(-s, v, tail);
                }
            }
        }
    }
    counters::add_flops(4 * (m * n * n) as u64);
    (Matrix::from_columns(&q_cols).expect("finite Q"), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_orthonormality() {
        let a = Matrix::from_fn(7, 3, |i, j| ((i * 5 + j * 3) % 7) as f64 - 2.5);
        let (q, r) = householder_qr(&a);
        assert!(q.orthonormality_defect() < 1e-14);
        assert!((&q.matmul(&r) - &a).frobenius_norm() < 1e-13);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn rank_deficient_still_orthonormal() {
        let a = Matrix::from_fn(6, 3, |i, _| i as f64);
        let (q, r) = householder_qr(&a);
        assert!(q.orthonormality_defect() < 1e-14);
        assert!((&q.matmul(&r) - &a).frobenius_norm() < 1e-13);

        let (q, r) = householder_qr(&Matrix::zeros(4, 2));
        assert_eq!(q.orthonormality_defect(), 0.0);
        assert_eq!(r.max_abs(), 0.0);
    }
}
