//! Dense linear algebra kernels: matrix type, thin SVD, QR
//! orthonormalization and small square solves.

pub mod counters;
mod householder;
mod matrix;
mod qr;
mod solve;
mod svd;

pub use householder::householder_qr;
pub use matrix::Matrix;
pub use qr::qr_orthonormalize;
pub use solve::{condition_estimate, solve_square, MAX_CONDITION};
pub use svd::{thin_svd, thin_svd_with_cap, ThinSvd};

pub(crate) use solve::solve_square_scaled;
pub(crate) use svd::apply_sign_convention;
