//! Geometry of the Grassmann manifold `G(q, N)` of `q`-dimensional
//! subspaces of `ℝᴺ`.
//!
//! A point is represented by any `N×q` matrix `Φ` with orthonormal columns;
//! `Φ` and `ΦQ` (`Q` orthogonal) denote the same subspace. Tangent vectors
//! at `[Φ]` are `N×q` matrices `Δ` with `ΦᵀΔ = 0`.
//!
//! ```text
//! d([Φ], [Ψ])   = sqrt(Σ θᵢ²),   cos θᵢ = σᵢ(ΦᵀΨ)
//! Exp_Φ(Δ)      = span(Φ V cos Σ + U sin Σ),          Δ = U Σ Vᵀ
//! Log_Φ([Ψ])    = U atan(Σ) Vᵀ,   U Σ Vᵀ = (I − ΦΦᵀ) Ψ (ΦᵀΨ)⁻¹
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{qr_orthonormalize, solve_square_scaled, thin_svd, Matrix};

/// Tolerance on `‖ΦᵀΦ − I‖_F` for a matrix to count as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative tolerance on `‖ΦᵀΔ‖_F` for a tangent vector.
pub const HORIZONTAL_TOL: f64 = 1e-8;

/// Orthonormal representative of a point on the Grassmann manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    phi: Matrix,
}

impl OrthonormalBasis {
    /// Wraps `phi` after checking that its columns are orthonormal.
    pub fn new(phi: Matrix) -> Result<Self> {
        if phi.rows() < phi.cols() {
            return Err(Error::InvalidMatrix(format!(
                "basis must have at least as many rows as columns, got {:?}",
                phi.shape()
            )));
        }
        let defect = phi.orthonormality_defect();
        if !(defect <= ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { phi })
    }

    /// Orthonormal basis of the column span of `a`.
    pub fn from_span(a: &Matrix) -> Result<Self> {
        Ok(Self { phi: qr_orthonormalize(a)? })
    }

    pub(crate) fn new_unchecked(phi: Matrix) -> Self {
        debug_assert!(phi.orthonormality_defect() <= 1e-8);
        Self { phi }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn into_matrix(self) -> Matrix {
        self.phi
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.phi.rows()
    }

    /// Subspace dimension `q`.
    pub fn dim(&self) -> usize {
        self.phi.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.phi.shape()
    }

    /// Another representative `Φ·Q` of the same subspace. `q` must be
    /// orthogonal.
    pub fn rotated(&self, q: &Matrix) -> Result<Self> {
        Self::new(self.phi.matmul(q))
    }
}

/// Tangent vector `Δ` at a base point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: Arc<OrthonormalBasis>,
    delta: Matrix,
}

impl TangentVector {
    /// Checks shape and horizontality `‖ΦᵀΔ‖_F ≤ 1e−8·max(1, ‖Δ‖_F)`.
    pub fn new(base: Arc<OrthonormalBasis>, delta: Matrix) -> Result<Self> {
        if delta.shape() != base.shape() {
            return Err(Error::ShapeMismatch { op: "tangent vector", lhs: base.shape(), rhs: delta.shape() });
        }
        let defect = base.matrix().tr_matmul(&delta).frobenius_norm();
        if !(defect <= HORIZONTAL_TOL * delta.frobenius_norm().max(1.0)) {
            return Err(Error::NotHorizontal { defect });
        }
        Ok(Self { base, delta })
    }

    pub(crate) fn new_unchecked(base: Arc<OrthonormalBasis>, delta: Matrix) -> Self {
        debug_assert_eq!(delta.shape(), base.shape());
        Self { base, delta }
    }

    pub fn zero(base: Arc<OrthonormalBasis>) -> Self {
        let (n, q) = base.shape();
        Self { delta: Matrix::zeros(n, q), base }
    }

    pub fn base(&self) -> &Arc<OrthonormalBasis> {
        &self.base
    }

    pub fn delta(&self) -> &Matrix {
        &self.delta
    }

    pub fn into_delta(self) -> Matrix {
        self.delta
    }

    /// Riemannian norm `‖Δ‖_F`, equal to the length of the geodesic it
    /// launches up to time 1.
    pub fn norm(&self) -> f64 {
        self.delta.frobenius_norm()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { base: Arc::clone(&self.base), delta: self.delta.scale(t) }
    }

    pub fn is_zero(&self) -> bool {
        self.delta.as_slice().iter().all(|&v| v == 0.0)
    }
}

/// Principal angles in radians, non-decreasing, each in `[0, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngles(pub Vec<f64>);

impl PrincipalAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }
}

fn check_same_shape(op: &'static str, x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch { op, lhs: x.shape(), rhs: y.shape() });
    }
    Ok(())
}

/// Principal angles between `[x]` and `[y]`.
///
/// Cosines come from the singular values of `xᵀy`. Angles below π/4 are
/// taken from the sines, the singular values of `y − x·xᵀy`, because
/// `arccos` loses about half the digits near 1.
pub fn principal_angles(x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<PrincipalAngles> {
    check_same_shape("principal_angles", x, y)?;
    let cross = x.matrix().tr_matmul(y.matrix());
    let cosines = thin_svd(&cross)?.sigma;
    let residual = y.matrix() - &x.matrix().matmul(&cross);
    let sines = thin_svd(&residual)?.sigma;

    let q = cosines.len();
    let mut angles: Vec<f64> = (0..q)
        .map(|i| {
            let c = cosines[i].clamp(0.0, 1.0);
            if c > FRAC_1_SQRT_2 {
                sines[q - 1 - i].clamp(0.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .map(|a| a.clamp(0.0, FRAC_PI_2))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(PrincipalAngles(angles))
}

/// Geodesic distance `sqrt(Σ θᵢ²)`.
pub fn geodesic_distance(x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<f64> {
    let angles = principal_angles(x, y)?;
    Ok(angles.0.iter().map(|a| a * a).sum::<f64>().sqrt())
}

/// Logarithm map at `base`; the result shares `base` by reference.
pub fn log_map_at(base: &Arc<OrthonormalBasis>, target: &OrthonormalBasis) -> Result<TangentVector> {
    check_same_shape("log_map", base, target)?;
    if base.matrix() == target.matrix() {
        return Ok(TangentVector::zero(Arc::clone(base)));
    }
    let phi = base.matrix();
    let cross = phi.tr_matmul(target.matrix());
    let projected = target.matrix() - &phi.matmul(&cross);
    // projected · cross⁻¹ = (cross⁻ᵀ · projectedᵀ)ᵀ
    let lifted = solve_square_scaled(&cross.transpose(), &projected.transpose(), 1.0)
        .map_err(|e| match e {
            Error::IllConditioned { condition } => Error::OutsideLogNeighborhood { condition },
            other => other,
        })?
        .transpose();
    let svd = thin_svd(&lifted)?;
    let angles: Vec<f64> = svd.sigma.iter().map(|s| s.atan()).collect();
    let delta = svd.u.scale_columns(&angles).matmul_tr(&svd.v);
    Ok(TangentVector::new_unchecked(Arc::clone(base), delta))
}

/// Logarithm map `Log_base([target])`.
///
/// Defined while `baseᵀ·target` is invertible; beyond that (some principal
/// angle at π/2) the geodesic is not unique and an
/// [`Error::OutsideLogNeighborhood`] is returned. `log_map(x, x)` is the
/// exact zero vector.
pub fn log_map(base: &OrthonormalBasis, target: &OrthonormalBasis) -> Result<TangentVector> {
    log_map_at(&Arc::new(base.clone()), target)
}

fn same_base(a: &Arc<OrthonormalBasis>, b: &OrthonormalBasis) -> bool {
    if std::ptr::eq(Arc::as_ptr(a), b) {
        return true;
    }
    a.shape() == b.shape()
        && a.matrix().as_slice().iter().zip(b.matrix().as_slice()).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// Exponential map `Exp_base(velocity)`, re-orthonormalized.
pub fn exp_map(base: &OrthonormalBasis, velocity: &TangentVector) -> Result<OrthonormalBasis> {
    if !same_base(velocity.base(), base) {
        return Err(Error::BaseMismatch);
    }
    let svd = thin_svd(velocity.delta())?;
    let cos: Vec<f64> = svd.sigma.iter().map(|s| s.cos()).collect();
    let sin: Vec<f64> = svd.sigma.iter().map(|s| s.sin()).collect();
    let mut y = base.matrix().matmul(&svd.v.scale_columns(&cos));
    y.add_scaled(1.0, &svd.u.scale_columns(&sin));
    OrthonormalBasis::from_span(&y)
}
