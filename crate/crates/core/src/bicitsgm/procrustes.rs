use crate::error::{Error, Result};
use crate::grassmann::OrthonormalBasis;
use crate::linalg::{thin_svd, Matrix};

/// Orthogonal `Q` minimizing `‖moving·Q − target‖_F`.
///
/// With `U Σ Vᵀ` the SVD of `movingᵀ·target`, the optimum is `Q = U·Vᵀ`.
pub fn procrustes_align(moving: &OrthonormalBasis, target: &OrthonormalBasis) -> Result<Matrix> {
    if moving.shape() != target.shape() {
        return Err(Error::ShapeMismatch { op: "procrustes_align", lhs: moving.shape(), rhs: target.shape() });
    }
    polar(&moving.matrix().tr_matmul(target.matrix()))
}

/// Orthogonal polar factor `U·Vᵀ` of a square matrix.
pub(crate) fn polar(m: &Matrix) -> Result<Matrix> {
    let svd = thin_svd(m)?;
    Ok(svd.u.matmul_tr(&svd.v))
}
