use super::counters;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Systems whose 1-norm condition estimate reaches this value are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// LU factorization with partial pivoting of a square matrix.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &Matrix) -> Option<Lu> {
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| lu[x * n + k].abs().total_cmp(&lu[y * n + k].abs())).unwrap();
            if lu[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        counters::add_flops((2 * n * n * n / 3) as u64);
        Some(Lu { n, lu, perm })
    }

    /// Solves for every column of `b` (n×m).
    fn solve(&self, b: &Matrix) -> Matrix {
        let (n, m) = (self.n, b.cols());
        let mut x = vec![0.0; n * m];
        for (i, &pi) in self.perm.iter().enumerate() {
            x[i * m..(i + 1) * m].copy_from_slice(b.row(pi));
        }
        for i in 0..n {
            for k in 0..i {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..m {
                        x[i * m + j] -= f * x[k * m + j];
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let f = self.lu[i * n + k];
                if f != 0.0 {
                    for j in 0..m {
                        x[i * m + j] -= f * x[k * m + j];
                    }
                }
            }
            let d = self.lu[i * n + i];
            for j in 0..m {
                x[i * m + j] /= d;
            }
        }
        counters::add_flops(2 * (n * n * m) as u64);
        Matrix::from_raw(n, m, x)
    }
}

fn norm_1(a: &Matrix) -> f64 {
    (0..a.cols()).map(|j| (0..a.rows()).map(|i| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `κ₁(a) = ‖a‖₁·‖a⁻¹‖₁`, computed from the explicit inverse. Returns
/// infinity for exactly singular input. Intended for the small `q×q`
/// systems of this crate, where the inverse is cheap.
pub fn condition_estimate(a: &Matrix) -> f64 {
    assert_eq!(a.rows(), a.cols());
    match Lu::factor(a) {
        Some(lu) => norm_1(a) * norm_1(&lu.solve(&Matrix::identity(a.rows()))),
        None => f64::INFINITY,
    }
}

/// Solves `a·x = b` for square `a` (q×q) and `b` (q×m).
pub fn solve_square(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    solve_square_scaled(a, b, 0.0)
}

/// Like [`solve_square`], but measures the condition as
/// `max(‖a‖₁, reference)·‖a⁻¹‖₁`. Products of orthonormal matrices have norm
/// at most one, so passing `reference = 1` flags a uniformly small `a` that
/// the relative condition number alone would accept.
pub(crate) fn solve_square_scaled(a: &Matrix, b: &Matrix, reference: f64) -> Result<Matrix> {
    if a.rows() != a.cols() || b.rows() != a.rows() {
        return Err(Error::ShapeMismatch { op: "solve_square", lhs: a.shape(), rhs: b.shape() });
    }
    let lu = Lu::factor(a).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let inv = lu.solve(&Matrix::identity(a.rows()));
    let condition = norm_1(a).max(reference) * norm_1(&inv);
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    Ok(lu.solve(b))
}
