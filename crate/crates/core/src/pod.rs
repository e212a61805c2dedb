//! Proper orthogonal decomposition of snapshot matrices.
//!
//! A snapshot matrix holds one state per column (`N` spatial points by
//! `N_t` time steps). Its POD is the truncated SVD: spatial modes,
//! singular values and temporal coefficients.
//!
//! When `N ≥ 2·N_t` the decomposition is computed on the small side: a
//! Householder QR reduces the snapshots to an `N_t×N_t` triangle whose SVD
//! is then lifted back. Forming the Gram matrix `SᵀS` would be cheaper
//! still but squares the condition number, and the trailing modes retained
//! by a tight energy threshold would lose their orthogonality.

use crate::error::{Error, Result};
use crate::grassmann::OrthonormalBasis;
use crate::linalg::{apply_sign_convention, householder_qr, thin_svd, Matrix, ThinSvd};

/// Modes whose singular value falls below this fraction of the largest are
/// never retained.
pub const NULL_MODE_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TruncationRule {
    /// Keep exactly `q` modes (fewer if the trailing ones are null).
    Rank(usize),
    /// Keep the fewest modes whose energy fraction reaches `epsilon`.
    Energy(f64),
}

impl std::fmt::Display for TruncationRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TruncationRule::Rank(q) => write!(f, "rank:{q}"),
            TruncationRule::Energy(e) => write!(f, "energy:{e}"),
        }
    }
}

impl std::str::FromStr for TruncationRule {
    type Err = Error;

    /// Parses `rank:<q>` or `energy:<epsilon>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Pod(format!("cannot parse truncation rule {s:?}"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "rank" => Ok(TruncationRule::Rank(value.trim().parse().map_err(|_| bad())?)),
            "energy" => Ok(TruncationRule::Energy(value.trim().parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PodOptions {
    pub rule: TruncationRule,
    /// Subtract the temporal mean of every spatial point before decomposing.
    pub center: bool,
}

impl PodOptions {
    pub fn new(rule: TruncationRule) -> Self {
        Self { rule, center: false }
    }
}

#[derive(Clone, Debug)]
pub struct PodResult {
    pub modes: OrthonormalBasis,
    pub singular_values: Vec<f64>,
    /// `N_t×q` right singular vectors.
    pub temporal: Matrix,
    pub energy_fraction: f64,
    /// All singular values of the (centered) snapshots, not only the kept ones.
    pub spectrum: Vec<f64>,
    /// Rank asked for by the rule before null modes were dropped.
    pub requested_rank: usize,
    /// Temporal mean that was subtracted, when centering was requested.
    pub mean: Option<Vec<f64>>,
}

impl PodResult {
    /// Number of retained modes.
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn temporal_basis(&self) -> Result<OrthonormalBasis> {
        OrthonormalBasis::new(self.temporal.clone())
    }

    /// `modes · diag(σ) · temporalᵀ`, plus the mean if it was removed.
    pub fn reconstruct(&self) -> Matrix {
        let mut out = self.modes.matrix().scale_columns(&self.singular_values).matmul_tr(&self.temporal);
        if let Some(mean) = &self.mean {
            for (i, m) in mean.iter().enumerate() {
                out.row_mut(i).iter_mut().for_each(|v| *v += m);
            }
        }
        out
    }
}

pub fn compute_pod(snapshots: &Matrix, rule: TruncationRule) -> Result<PodResult> {
    compute_pod_with(snapshots, &PodOptions::new(rule))
}

pub fn compute_pod_with(snapshots: &Matrix, options: &PodOptions) -> Result<PodResult> {
    let (n, nt) = snapshots.shape();
    match options.rule {
        TruncationRule::Rank(q) if q == 0 || q > n.min(nt) => {
            return Err(Error::Pod(format!("requested rank {q} outside 1..={} for {n}x{nt} snapshots", n.min(nt))))
        }
        TruncationRule::Energy(e) if !(e > 0.0 && e <= 1.0) => {
            return Err(Error::Pod(format!("energy threshold {e} outside (0, 1]")))
        }
        _ => {}
    }

    let (data, mean) = if options.center {
        let mean: Vec<f64> = (0..n).map(|i| snapshots.row(i).iter().sum::<f64>() / nt as f64).collect();
        let mut centered = snapshots.clone();
        for (i, m) in mean.iter().enumerate() {
            centered.row_mut(i).iter_mut().for_each(|v| *v -= m);
        }
        (centered, Some(mean))
    } else {
        (snapshots.clone(), None)
    };

    let svd = if n >= 2 * nt { reduced_svd(&data)? } else { thin_svd(&data)? };
    let spectrum = svd.sigma.clone();
    let leading = spectrum[0];
    if leading == 0.0 {
        return Err(Error::Pod("snapshot matrix is identically zero".into()));
    }

    let energies: Vec<f64> = spectrum.iter().map(|s| s * s).collect();
    let total: f64 = energies.iter().sum();
    let requested = match options.rule {
        TruncationRule::Rank(q) => q,
        TruncationRule::Energy(eps) => {
            let mut acc = 0.0;
            let mut q = energies.len();
            for (i, e) in energies.iter().enumerate() {
                acc += e;
                if acc / total >= eps - 1e-14 {
                    q = i + 1;
                    break;
                }
            }
            q
        }
    };
    let non_null = spectrum.iter().take_while(|&&s| s >= NULL_MODE_TOL * leading).count();
    let q = requested.min(non_null);
    if q < requested {
        log::warn!("pod: only {q} of {requested} requested modes are above the null threshold");
    }

    let kept: f64 = energies[..q].iter().sum();
    Ok(PodResult {
        modes: OrthonormalBasis::new_unchecked(svd.u.column_range(0, q)),
        singular_values: spectrum[..q].to_vec(),
        temporal: svd.v.column_range(0, q),
        energy_fraction: (kept / total).min(1.0),
        spectrum,
        requested_rank: requested,
        mean,
    })
}

/// SVD of a tall matrix through its Householder triangle.
fn reduced_svd(a: &Matrix) -> Result<ThinSvd> {
    let (q, r) = householder_qr(a);
    let small = thin_svd(&r)?;
    let mut u = q.matmul(&small.u);
    let mut v = small.v;
    apply_sign_convention(&mut u, &mut v);
    Ok(ThinSvd { u, sigma: small.sigma, v })
}
