use super::counters;
use super::matrix::{axpy, dot, Matrix};
use crate::error::{Error, Result};

/// Relative threshold below which a column is treated as dependent on the
/// previous ones.
const RANK_TOL: f64 = 1e-12;

/// Orthonormal basis `Q` (N×q) of the column span of `a`, by modified
/// Gram–Schmidt with one reorthogonalization pass.
///
/// The implicit `R` factor has a positive diagonal, so an input that is
/// already orthonormal is returned unchanged up to rounding.
pub fn qr_orthonormalize(a: &Matrix) -> Result<Matrix> {
    let (n, q) = a.shape();
    if n < q {
        return Err(Error::InvalidMatrix(format!("qr_orthonormalize needs rows >= cols, got {n}x{q}")));
    }
    let mut cols = a.to_columns();
    let scale = cols.iter().map(|c| dot(c, c).sqrt()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return Err(Error::RankDeficient { column: 0 });
    }

    for j in 0..q {
        let (done, rest) = cols.split_at_mut(j);
        let c = &mut rest[0];
        for _ in 0..2 {
            for prev in done.iter() {
                let p = dot(prev, c);
                axpy(-p, prev, c);
            }
        }
        let norm = dot(c, c).sqrt();
        if norm <= RANK_TOL * scale {
            return Err(Error::RankDeficient { column: j });
        }
        c.iter_mut().for_each(|x| *x /= norm);
    }
    counters::add_flops(4 * (n * q * q) as u64);
    Matrix::from_columns(&cols)
}
