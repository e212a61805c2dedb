//! Bi-calibrated reconstruction of snapshot fields at untrained parameters.
//!
//! Spatial and temporal subspaces are interpolated separately on their
//! Grassmann manifolds. Interpolated bases come back in an arbitrary
//! orientation, so the core matrix joining them has to be recovered by
//! calibration:
//!
//! * [`Calibration::Core`] aligns every sample's bases to the interpolated
//!   ones with orthogonal Procrustes, interpolates the aligned cores
//!   `Pᵢᵀ·diag(σᵢ)·Rᵢ` and diagonalizes the result with a small SVD.
//! * [`Calibration::Diagonal`] aligns the interpolated bases to one anchor
//!   sample and interpolates the singular values entrywise.
//!
//! [`bi_build`] computes the tangent caches and their reduced frames once;
//! [`bi_query`] then works on `O(N_p·q)`-sized coordinates and touches
//! full-size matrices only to lift the final factors.
//! [`bi_query_from_scratch`] performs the same computation directly on the
//! full matrices, recomputing every logarithm.

mod cost;
mod frame;
mod persist;
mod procrustes;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use cost::{online_cost_report, query_points, CostReport};
pub use procrustes::procrustes_align;

pub(crate) use frame::ReducedFrame;
pub(crate) use procrustes::polar;

use crate::error::{Error, Result};
use crate::grassmann::{exp_map, OrthonormalBasis};
use crate::interp::{combine_vectors, TangentInterpolator};
use crate::itsgm::{RefPolicy, SampleSet, TangentCache};
use crate::linalg::{apply_sign_convention, thin_svd, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Calibration {
    Core,
    Diagonal,
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calibration::Core => "core",
            Calibration::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Calibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "core" => Ok(Calibration::Core),
            "diagonal" => Ok(Calibration::Diagonal),
            _ => Err(Error::Samples(format!("unknown calibration {s:?} (core or diagonal)"))),
        }
    }
}

/// Which sample serves as the Procrustes target in diagonal calibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorPolicy {
    /// The sample nearest to the query.
    Nearest,
    Fixed(usize),
}

impl fmt::Display for AnchorPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnchorPolicy::Nearest => f.write_str("nearest"),
            AnchorPolicy::Fixed(i) => write!(f, "{i}"),
        }
    }
}

impl FromStr for AnchorPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nearest" => Ok(AnchorPolicy::Nearest),
            other => other
                .parse()
                .map(AnchorPolicy::Fixed)
                .map_err(|_| Error::Samples(format!("anchor policy {s:?} is neither 'nearest' nor an index"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiConfig {
    /// Tangency point of both caches. `Nearest` picks the sample closest to
    /// the centroid of the sampled parameters.
    pub reference: RefPolicy,
    pub anchor: AnchorPolicy,
    pub calibration: Calibration,
}

impl Default for BiConfig {
    fn default() -> Self {
        Self { reference: RefPolicy::Nearest, anchor: AnchorPolicy::Nearest, calibration: Calibration::Core }
    }
}

/// Reconstructed snapshots `spatial · diag(sigma) · temporalᵀ`.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub field: Matrix,
    pub spatial: OrthonormalBasis,
    pub temporal: OrthonormalBasis,
    pub sigma: Vec<f64>,
    /// The query lies outside the bounding box of the sampled parameters.
    pub extrapolated: bool,
}

impl Reconstruction {
    fn assemble(mut spatial: Matrix, sigma: Vec<f64>, mut temporal: Matrix, extrapolated: bool) -> Self {
        apply_sign_convention(&mut spatial, &mut temporal);
        let field = spatial.matmul_tr(&temporal.scale_columns(&sigma));
        Self {
            field,
            spatial: OrthonormalBasis::new_unchecked(spatial),
            temporal: OrthonormalBasis::new_unchecked(temporal),
            sigma,
            extrapolated,
        }
    }
}

/// Offline data: tangent caches of both families and their reduced frames.
#[derive(Clone, Debug)]
pub struct BiRomModel {
    samples: SampleSet,
    config: BiConfig,
    spatial: ReducedFrame,
    temporal: ReducedFrame,
}

/// Factors of a query in frame coordinates.
#[derive(Clone, Debug)]
pub(crate) struct ReducedFactors {
    pub spatial: Matrix,
    pub sigma: Vec<f64>,
    pub temporal: Matrix,
}

/// Offline stage: logs of both families at the reference sample.
pub fn bi_build(samples: SampleSet, config: BiConfig) -> Result<BiRomModel> {
    let r = match config.reference {
        RefPolicy::Nearest => samples.nearest(&samples.centroid()),
        fixed => fixed.resolve(&samples, &[])?,
    };
    if let AnchorPolicy::Fixed(a) = config.anchor {
        if a >= samples.len() {
            return Err(Error::Samples(format!("anchor index {a} out of range for {} samples", samples.len())));
        }
    }
    let spatial_bases = samples.spatial_bases();
    let temporal_bases = samples.temporal_bases();
    let spatial = TangentCache::build(&spatial_bases, r).map_err(|e| e.at_stage("spatial"))?;
    let temporal = TangentCache::build(&temporal_bases, r).map_err(|e| e.at_stage("temporal"))?;
    log::debug!("bi_build: reference sample {r} of {}", samples.len());
    BiRomModel::from_caches(samples, config, spatial, temporal)
}

impl BiRomModel {
    pub(crate) fn from_caches(
        samples: SampleSet,
        config: BiConfig,
        spatial: TangentCache,
        temporal: TangentCache,
    ) -> Result<Self> {
        let spatial = ReducedFrame::new(spatial, &samples.spatial_bases()).map_err(|e| e.at_stage("spatial"))?;
        let temporal = ReducedFrame::new(temporal, &samples.temporal_bases()).map_err(|e| e.at_stage("temporal"))?;
        Ok(Self { samples, config, spatial, temporal })
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn config(&self) -> &BiConfig {
        &self.config
    }

    pub fn ref_index(&self) -> usize {
        self.spatial.cache.ref_index()
    }

    pub fn spatial_cache(&self) -> &TangentCache {
        &self.spatial.cache
    }

    pub fn temporal_cache(&self) -> &TangentCache {
        &self.temporal.cache
    }

    /// Singular values of every sample, one row per sample.
    pub fn sigma_table(&self) -> Vec<&[f64]> {
        self.samples.triples().iter().map(|t| t.sigma.as_slice()).collect()
    }

    /// Widths `(q + m_spatial, q + m_temporal)` of the two reduced frames.
    pub fn frame_dims(&self) -> (usize, usize) {
        (self.spatial.frame.cols(), self.temporal.frame.cols())
    }

    pub(crate) fn spatial_frame(&self) -> &Matrix {
        &self.spatial.frame
    }

    pub(crate) fn temporal_frame(&self) -> &Matrix {
        &self.temporal.frame
    }

    fn anchor(&self, gamma: &[f64]) -> usize {
        match self.config.anchor {
            AnchorPolicy::Nearest => self.samples.nearest(gamma),
            AnchorPolicy::Fixed(a) => a,
        }
    }

    pub(crate) fn reduced_query(&self, gamma: &[f64], method: &TangentInterpolator) -> Result<ReducedFactors> {
        let w = method.weights(self.samples.params(), gamma)?;
        let qu = self.spatial.exp_coords(&w).map_err(|e| e.at_stage("spatial"))?;
        let qv = self.temporal.exp_coords(&w).map_err(|e| e.at_stage("temporal"))?;
        match self.config.calibration {
            Calibration::Core => {
                let q = self.samples.rank();
                let mut core = Matrix::zeros(q, q);
                for (i, t) in self.samples.triples().iter().enumerate() {
                    if w[i] == 0.0 {
                        continue;
                    }
                    let p = polar(&self.spatial.basis_coords[i].tr_matmul(&qu))?;
                    let r = polar(&self.temporal.basis_coords[i].tr_matmul(&qv))?;
                    core.add_scaled(w[i], &aligned_core(&p, &t.sigma, &r));
                }
                let svd = thin_svd(&core)?;
                Ok(ReducedFactors { spatial: qu.matmul(&svd.u), sigma: svd.sigma, temporal: qv.matmul(&svd.v) })
            }
            Calibration::Diagonal => {
                let a = self.anchor(gamma);
                let pu = polar(&qu.tr_matmul(&self.spatial.basis_coords[a]))?;
                let pv = polar(&qv.tr_matmul(&self.temporal.basis_coords[a]))?;
                Ok(ReducedFactors {
                    spatial: qu.matmul(&pu),
                    sigma: interpolate_sigma(&self.samples, &w),
                    temporal: qv.matmul(&pv),
                })
            }
        }
    }

    pub(crate) fn lift(&self, f: ReducedFactors, extrapolated: bool) -> Reconstruction {
        Reconstruction::assemble(self.spatial.lift(&f.spatial), f.sigma, self.temporal.lift(&f.temporal), extrapolated)
    }
}

/// Online stage.
pub fn bi_query(model: &BiRomModel, gamma: &[f64], method: &TangentInterpolator) -> Result<Reconstruction> {
    let factors = model.reduced_query(gamma, method)?;
    Ok(model.lift(factors, !model.samples.contains(gamma)))
}

/// The full computation on full-size matrices, logs included. With
/// `config.reference = Fixed(model.ref_index())` it matches [`bi_query`] on
/// a model built from the same samples; `Nearest` here resolves per query.
pub fn bi_query_from_scratch(
    samples: &SampleSet,
    gamma: &[f64],
    method: &TangentInterpolator,
    config: &BiConfig,
) -> Result<Reconstruction> {
    let w = method.weights(samples.params(), gamma)?;
    let r = config.reference.resolve(samples, gamma)?;
    let spatial_bases = samples.spatial_bases();
    let temporal_bases = samples.temporal_bases();
    let interpolate = |bases: &[Arc<OrthonormalBasis>]| {
        let cache = TangentCache::build(bases, r)?;
        exp_map(cache.base(), &cache.combine(&w))
    };
    let u = interpolate(&spatial_bases).map_err(|e| e.at_stage("spatial"))?;
    let v = interpolate(&temporal_bases).map_err(|e| e.at_stage("temporal"))?;

    let (spatial, sigma, temporal) = match config.calibration {
        Calibration::Core => {
            let q = samples.rank();
            let mut core = Matrix::zeros(q, q);
            for (i, t) in samples.triples().iter().enumerate() {
                if w[i] == 0.0 {
                    continue;
                }
                let p = procrustes_align(&t.spatial, &u)?;
                let rr = procrustes_align(&t.temporal, &v)?;
                core.add_scaled(w[i], &aligned_core(&p, &t.sigma, &rr));
            }
            let svd = thin_svd(&core)?;
            (u.matrix().matmul(&svd.u), svd.sigma, v.matrix().matmul(&svd.v))
        }
        Calibration::Diagonal => {
            let a = match config.anchor {
                AnchorPolicy::Nearest => samples.nearest(gamma),
                AnchorPolicy::Fixed(a) => a,
            };
            let pu = procrustes_align(&u, &samples.triples()[a].spatial)?;
            let pv = procrustes_align(&v, &samples.triples()[a].temporal)?;
            (u.matrix().matmul(&pu), interpolate_sigma(samples, &w), v.matrix().matmul(&pv))
        }
    };
    Ok(Reconstruction::assemble(spatial, sigma, temporal, !samples.contains(gamma)))
}

/// `Pᵀ·diag(σ)·R`.
fn aligned_core(p: &Matrix, sigma: &[f64], r: &Matrix) -> Matrix {
    p.tr_matmul(&Matrix::from_diagonal(sigma).matmul(r))
}

/// Entrywise interpolation of the singular values, clamped at zero.
fn interpolate_sigma(samples: &SampleSet, weights: &[f64]) -> Vec<f64> {
    let rows: Vec<&[f64]> = samples.triples().iter().map(|t| t.sigma.as_slice()).collect();
    let mut sigma = combine_vectors(weights, &rows);
    for (k, s) in sigma.iter_mut().enumerate() {
        if *s < 0.0 {
            log::warn!("bicitsgm: interpolated singular value {k} is negative ({s:e}), clamped to 0");
            *s = 0.0;
        }
    }
    sigma
}
