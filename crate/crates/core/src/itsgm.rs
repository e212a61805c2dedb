//! Interpolation of parametrized subspaces through one tangent space.
//!
//! Offline, every sampled subspace is mapped to the tangent space at a
//! reference sample with the logarithm map. Online, the cached velocities
//! are interpolated entrywise in the query parameter and the result is
//! mapped back with the exponential map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{exp_map, log_map_at, OrthonormalBasis, TangentVector};
use crate::interp::{combine, TangentInterpolator};
use crate::linalg::{thin_svd, Matrix};

/// Truncated SVD of one sample: `spatial · diag(sigma) · temporalᵀ`.
#[derive(Clone, Debug)]
pub struct SvdTriple {
    pub spatial: Arc<OrthonormalBasis>,
    pub sigma: Vec<f64>,
    pub temporal: Arc<OrthonormalBasis>,
}

impl SvdTriple {
    pub fn new(spatial: OrthonormalBasis, sigma: Vec<f64>, temporal: OrthonormalBasis) -> Result<Self> {
        let q = spatial.dim();
        if sigma.len() != q || temporal.dim() != q {
            return Err(Error::Samples(format!(
                "triple ranks disagree: spatial {q}, sigma {}, temporal {}",
                sigma.len(),
                temporal.dim()
            )));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Samples(format!("singular values must be non-negative, got {sigma:?}")));
        }
        Ok(Self { spatial: Arc::new(spatial), sigma, temporal: Arc::new(temporal) })
    }

    /// `spatial · diag(sigma) · temporalᵀ`.
    pub fn field(&self) -> Matrix {
        self.spatial.matrix().scale_columns(&self.sigma).matmul_tr(self.temporal.matrix())
    }
}

/// Sampled parameters and their SVD triples.
#[derive(Clone, Debug)]
pub struct SampleSet {
    params: Vec<Vec<f64>>,
    triples: Vec<SvdTriple>,
}

impl SampleSet {
    /// Validates at least two samples, pairwise distinct parameters of one
    /// dimension, and a common `N`, `N_t` and `q`.
    pub fn new(params: Vec<Vec<f64>>, triples: Vec<SvdTriple>) -> Result<Self> {
        if params.len() != triples.len() {
            return Err(Error::Samples(format!("{} parameters for {} samples", params.len(), triples.len())));
        }
        if params.len() < 2 {
            return Err(Error::Samples(format!("need at least 2 samples, got {}", params.len())));
        }
        let d = params[0].len();
        if d == 0 {
            return Err(Error::Samples("parameters must have at least one component".into()));
        }
        for (i, p) in params.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Samples(format!("sample {i} has parameter dimension {}, expected {d}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Samples(format!("sample {i} has a non-finite parameter")));
            }
            if let Some(j) = params[..i].iter().position(|o| o == p) {
                return Err(Error::Samples(format!("samples {j} and {i} share parameter {p:?}")));
            }
        }
        let first = &triples[0];
        let shape = (first.spatial.shape(), first.temporal.shape());
        for (i, t) in triples.iter().enumerate() {
            if (t.spatial.shape(), t.temporal.shape()) != shape {
                return Err(Error::Samples(format!(
                    "sample {i} has spatial {:?} and temporal {:?}, expected {:?} and {:?}",
                    t.spatial.shape(),
                    t.temporal.shape(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Self { params, triples })
    }

    /// A set holding only spatial subspaces, for plain subspace
    /// interpolation. Singular values are set to one and the temporal side
    /// to `I_q`.
    pub fn from_bases(params: Vec<Vec<f64>>, bases: Vec<OrthonormalBasis>) -> Result<Self> {
        let triples = bases
            .into_iter()
            .map(|b| {
                let q = b.dim();
                SvdTriple::new(b, vec![1.0; q], OrthonormalBasis::new_unchecked(Matrix::identity(q)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, triples)
    }

    /// Scalar parameters, one per sample.
    pub fn from_scalar_bases(params: &[f64], bases: Vec<OrthonormalBasis>) -> Result<Self> {
        Self::from_bases(params.iter().map(|&p| vec![p]).collect(), bases)
    }

    pub fn params(&self) -> &[Vec<f64>] {
        &self.params
    }

    pub fn triples(&self) -> &[SvdTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn param_dim(&self) -> usize {
        self.params[0].len()
    }

    /// Spatial dimension `N`.
    pub fn spatial_dim(&self) -> usize {
        self.triples[0].spatial.ambient_dim()
    }

    /// Temporal dimension `N_t`.
    pub fn temporal_dim(&self) -> usize {
        self.triples[0].temporal.ambient_dim()
    }

    pub fn rank(&self) -> usize {
        self.triples[0].sigma.len()
    }

    pub fn spatial_bases(&self) -> Vec<Arc<OrthonormalBasis>> {
        self.triples.iter().map(|t| Arc::clone(&t.spatial)).collect()
    }

    pub fn temporal_bases(&self) -> Vec<Arc<OrthonormalBasis>> {
        self.triples.iter().map(|t| Arc::clone(&t.temporal)).collect()
    }

    /// Index of the sample nearest to `gamma`; the lowest index wins ties.
    pub fn nearest(&self, gamma: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.params.iter().enumerate() {
            let d: f64 = p.iter().zip(gamma).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Whether `gamma` lies in the bounding box of the sampled parameters.
    pub fn contains(&self, gamma: &[f64]) -> bool {
        (0..self.param_dim()).all(|k| {
            let lo = self.params.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = self.params.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            gamma[k] >= lo && gamma[k] <= hi
        })
    }

    /// Mean of the sampled parameters.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.param_dim()).map(|k| self.params.iter().map(|p| p[k]).sum::<f64>() / n).collect()
    }
}

/// How the tangency point is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefPolicy {
    Fixed(usize),
    /// The sample nearest to the query.
    Nearest,
}

impl RefPolicy {
    pub fn resolve(self, samples: &SampleSet, gamma: &[f64]) -> Result<usize> {
        match self {
            RefPolicy::Fixed(i) if i >= samples.len() => {
                Err(Error::Samples(format!("reference index {i} out of range for {} samples", samples.len())))
            }
            RefPolicy::Fixed(i) => Ok(i),
            RefPolicy::Nearest => Ok(samples.nearest(gamma)),
        }
    }
}

impl std::fmt::Display for RefPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RefPolicy::Fixed(i) => write!(f, "{i}"),
            RefPolicy::Nearest => write!(f, "nearest"),
        }
    }
}

impl std::str::FromStr for RefPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nearest" => Ok(RefPolicy::Nearest),
            other => other
                .parse()
                .map(RefPolicy::Fixed)
                .map_err(|_| Error::Samples(format!("reference policy {s:?} is neither 'nearest' nor an index"))),
        }
    }
}

/// Velocities of every sample in the tangent space at the reference.
#[derive(Clone, Debug)]
pub struct TangentCache {
    ref_index: usize,
    velocities: Vec<TangentVector>,
}

impl TangentCache {
    /// Logs every basis at `bases[ref_index]`.
    pub fn build(bases: &[Arc<OrthonormalBasis>], ref_index: usize) -> Result<Self> {
        if ref_index >= bases.len() {
            return Err(Error::Samples(format!(
                "reference index {ref_index} out of range for {} samples",
                bases.len()
            )));
        }
        let base = &bases[ref_index];
        let velocities = bases
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if i == ref_index {
                    return Ok(TangentVector::zero(Arc::clone(base)));
                }
                log_map_at(base, b).map_err(|e| match e {
                    Error::OutsideLogNeighborhood { .. } => {
                        let cross = base.matrix().tr_matmul(b.matrix());
                        let min_singular_value = thin_svd(&cross).map(|s| *s.sigma.last().unwrap()).unwrap_or(f64::NAN);
                        Error::SampleOutsideNeighborhood { index: i, min_singular_value }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ref_index, velocities })
    }

    /// Reassembles a cache from stored velocities.
    pub fn from_velocities(base: Arc<OrthonormalBasis>, ref_index: usize, deltas: Vec<Matrix>) -> Result<Self> {
        if ref_index >= deltas.len() {
            return Err(Error::Samples(format!(
                "reference index {ref_index} out of range for {} velocities",
                deltas.len()
            )));
        }
        let velocities =
            deltas.into_iter().map(|d| TangentVector::new(Arc::clone(&base), d)).collect::<Result<Vec<_>>>()?;
        Ok(Self { ref_index, velocities })
    }

    pub fn ref_index(&self) -> usize {
        self.ref_index
    }

    pub fn base(&self) -> &Arc<OrthonormalBasis> {
        self.velocities[self.ref_index].base()
    }

    pub fn velocities(&self) -> &[TangentVector] {
        &self.velocities
    }

    /// `Σ wᵢ·Xᵢ` as a tangent vector at the reference.
    pub fn combine(&self, weights: &[f64]) -> TangentVector {
        let deltas: Vec<&Matrix> = self.velocities.iter().map(|v| v.delta()).collect();
        TangentVector::new_unchecked(Arc::clone(self.base()), combine(weights, &deltas))
    }
}

/// Offline stage on the spatial bases of `samples`.
pub fn itsgm_offline(samples: &SampleSet, ref_index: usize) -> Result<TangentCache> {
    TangentCache::build(&samples.spatial_bases(), ref_index)
}

/// Interpolated velocity at `gamma`.
pub fn interpolate_tangent(
    cache: &TangentCache,
    samples: &SampleSet,
    gamma: &[f64],
    method: &TangentInterpolator,
) -> Result<TangentVector> {
    if cache.velocities.len() != samples.len() {
        return Err(Error::Samples(format!(
            "cache holds {} velocities for {} samples",
            cache.velocities.len(),
            samples.len()
        )));
    }
    let w = method.weights(samples.params(), gamma)?;
    Ok(cache.combine(&w))
}

/// Maps an interpolated velocity back to the manifold.
pub fn itsgm_online(
    cache: &TangentCache,
    samples: &SampleSet,
    gamma: &[f64],
    method: &TangentInterpolator,
) -> Result<OrthonormalBasis> {
    let v = interpolate_tangent(cache, samples, gamma, method)?;
    exp_map(cache.base(), &v)
}

/// Offline and online stages in one call.
pub fn itsgm_interpolate(
    samples: &SampleSet,
    gamma: &[f64],
    reference: RefPolicy,
    method: &TangentInterpolator,
) -> Result<OrthonormalBasis> {
    let r = reference.resolve(samples, gamma)?;
    let cache = itsgm_offline(samples, r)?;
    itsgm_online(&cache, samples, gamma, method)
}
