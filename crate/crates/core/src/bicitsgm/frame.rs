//! Reduced coordinates for one family of bases (spatial or temporal).
//!
//! All sampled subspaces and every interpolated velocity lie in the span
//! of `B = [Φ_ref, W]`, where `W` is an orthonormal basis of the span of
//! the cached velocities. Offline, each velocity and each sampled basis is
//! stored through its coordinates in `B`; online, the exponential map and
//! the Procrustes products run on those small coordinate matrices and only
//! the final basis is lifted back to full size.

use std::sync::Arc;

use crate::error::Result;
use crate::grassmann::OrthonormalBasis;
use crate::interp::combine;
use crate::itsgm::TangentCache;
use crate::linalg::{householder_qr, qr_orthonormalize, thin_svd, Matrix};

/// Directions of the stacked velocities below this fraction of the
/// largest singular value are left out of the frame.
const FRAME_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub(crate) struct ReducedFrame {
    pub cache: TangentCache,
    /// `[Φ_ref, W]`, `n×(q+m)`.
    pub frame: Matrix,
    /// `Wᵀ·Xᵢ`, `m×q` each.
    pub velocity_coords: Vec<Matrix>,
    /// `Bᵀ·Φᵢ`, `(q+m)×q` each.
    pub basis_coords: Vec<Matrix>,
}

impl ReducedFrame {
    pub fn new(cache: TangentCache, bases: &[Arc<OrthonormalBasis>]) -> Result<Self> {
        let base = cache.base().matrix().clone();
        let moving: Vec<&Matrix> = cache.velocities().iter().filter(|v| !v.is_zero()).map(|v| v.delta()).collect();
        let w = if moving.is_empty() { None } else { span_basis(&Matrix::hstack(&moving), base.rows() - base.cols())? };
        let frame = match &w {
            Some(w) => Matrix::hstack(&[&base, w]),
            None => base,
        };
        let velocity_coords = match &w {
            Some(w) => cache.velocities().iter().map(|v| w.tr_matmul(v.delta())).collect(),
            None => Vec::new(),
        };
        let basis_coords = bases.iter().map(|b| frame.tr_matmul(b.matrix())).collect();
        Ok(Self { cache, frame, velocity_coords, basis_coords })
    }

    /// Number of columns of `W`.
    pub fn extra_dim(&self) -> usize {
        self.frame.cols() - self.cache.base().dim()
    }

    /// Coordinates in the frame of `Exp_ref(Σ wᵢ·Xᵢ)`, orthonormalized.
    pub fn exp_coords(&self, weights: &[f64]) -> Result<Matrix> {
        let q = self.cache.base().dim();
        let m = self.extra_dim();
        if m == 0 {
            return Ok(Matrix::identity(q));
        }
        let coords: Vec<&Matrix> = self.velocity_coords.iter().collect();
        let c = combine(weights, &coords);
        // Zero rows up to q keep the thin SVD square in q when m < q; their
        // left-vector entries only meet sin(0) and are dropped below.
        let padded = if m < q { Matrix::vstack(&[&c, &Matrix::zeros(q - m, q)]) } else { c };
        let svd = thin_svd(&padded)?;
        let cos: Vec<f64> = svd.sigma.iter().map(|s| s.cos()).collect();
        let sin: Vec<f64> = svd.sigma.iter().map(|s| s.sin()).collect();
        let head = svd.v.scale_columns(&cos);
        let tail = svd.u.scale_columns(&sin).row_range(0, m);
        qr_orthonormalize(&Matrix::vstack(&[&head, &tail]))
    }

    /// `B·coords`.
    pub fn lift(&self, coords: &Matrix) -> Matrix {
        self.frame.matmul(coords)
    }
}

/// Orthonormal basis of the numerically significant column span of `a`,
/// at most `limit` columns wide, or `None` if there is none.
fn span_basis(a: &Matrix, limit: usize) -> Result<Option<Matrix>> {
    let (q, svd) = if a.rows() >= a.cols() {
        let (q, r) = householder_qr(a);
        (Some(q), thin_svd(&r)?)
    } else {
        (None, thin_svd(a)?)
    };
    let leading = svd.sigma[0];
    let keep = svd.sigma.iter().take_while(|&&s| s > FRAME_TOL * leading).count().min(limit);
    if leading == 0.0 || keep == 0 {
        return Ok(None);
    }
    let u = svd.u.column_range(0, keep);
    Ok(Some(match q {
        Some(q) => q.matmul(&u),
        None => u,
    }))
}
