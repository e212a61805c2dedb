//! Scalar interpolation over scattered parameter samples.
//!
//! Every interpolant here is linear in the sampled data: the value at a
//! query is `Σ wᵢ·fᵢ` with weights that depend only on the parameters.
//! Tangent-space interpolation applies the same weights entrywise to the
//! velocity matrices, so one weight vector serves all `N·q` coordinates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{solve_square, Matrix};

/// Distance below which an IDW query counts as hitting a sample exactly.
pub const IDW_EXACT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RbfKernel {
    /// `exp(−(r/ε)²)`
    Gaussian,
    /// `(r/ε)²·ln(r/ε)`
    ThinPlate,
    /// `sqrt(1 + (r/ε)²)`
    Multiquadric,
}

impl RbfKernel {
    fn eval(self, r: f64, shape: f64) -> f64 {
        let s = r / shape;
        match self {
            RbfKernel::Gaussian => (-s * s).exp(),
            RbfKernel::ThinPlate if s == 0.0 => 0.0,
            RbfKernel::ThinPlate => s * s * s.ln(),
            RbfKernel::Multiquadric => s.hypot(1.0),
        }
    }

    fn name(self) -> &'static str {
        match self {
            RbfKernel::Gaussian => "gaussian",
            RbfKernel::ThinPlate => "thin-plate",
            RbfKernel::Multiquadric => "multiquadric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TangentInterpolator {
    /// Polynomial through all samples; scalar parameters only.
    Lagrange,
    /// Radial basis functions. `shape: None` uses the mean pairwise
    /// distance between the sampled parameters.
    Rbf { kernel: RbfKernel, shape: Option<f64> },
    /// Inverse distance weighting `wᵢ ∝ dᵢ^(−power)`.
    Idw { power: f64 },
}

impl TangentInterpolator {
    pub fn rbf(kernel: RbfKernel) -> Self {
        TangentInterpolator::Rbf { kernel, shape: None }
    }

    /// Interpolation weights at `gamma` for samples at `params`.
    pub fn weights(&self, params: &[Vec<f64>], gamma: &[f64]) -> Result<Vec<f64>> {
        check_params(params, gamma)?;
        match *self {
            TangentInterpolator::Lagrange => lagrange_weights(params, gamma),
            TangentInterpolator::Rbf { kernel, shape } => rbf_weights(params, gamma, kernel, shape),
            TangentInterpolator::Idw { power } => idw_weights(params, gamma, power),
        }
    }

    /// `Σ wᵢ·values[i]`, applied entrywise.
    pub fn interpolate_matrices(&self, params: &[Vec<f64>], gamma: &[f64], values: &[&Matrix]) -> Result<Matrix> {
        let w = self.weights(params, gamma)?;
        Ok(combine(&w, values))
    }
}

/// `Σ wᵢ·mᵢ`.
pub fn combine(weights: &[f64], matrices: &[&Matrix]) -> Matrix {
    assert_eq!(weights.len(), matrices.len());
    let (r, c) = matrices[0].shape();
    let mut out = Matrix::zeros(r, c);
    for (w, m) in weights.iter().zip(matrices) {
        if *w != 0.0 {
            out.add_scaled(*w, m);
        }
    }
    out
}

/// `Σ wᵢ·vᵢ` for equal-length vectors.
pub fn combine_vectors(weights: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (w, v) in weights.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += w * x;
        }
    }
    out
}

fn check_params(params: &[Vec<f64>], gamma: &[f64]) -> Result<()> {
    if params.is_empty() {
        return Err(Error::Interpolation("no samples".into()));
    }
    let d = params[0].len();
    if params.iter().any(|p| p.len() != d) || gamma.len() != d {
        return Err(Error::Interpolation(format!(
            "parameter dimension mismatch: samples have {d}, query has {}",
            gamma.len()
        )));
    }
    if gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::Interpolation(format!("non-finite query {gamma:?}")));
    }
    Ok(())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lagrange_weights(params: &[Vec<f64>], gamma: &[f64]) -> Result<Vec<f64>> {
    if gamma.len() != 1 {
        return Err(Error::Interpolation(format!(
            "Lagrange interpolation needs scalar parameters, got dimension {}",
            gamma.len()
        )));
    }
    let x: Vec<f64> = params.iter().map(|p| p[0]).collect();
    let g = gamma[0];
    let mut w = Vec::with_capacity(x.len());
    for (i, &xi) in x.iter().enumerate() {
        let mut l = 1.0;
        for (j, &xj) in x.iter().enumerate() {
            if i != j {
                if xi == xj {
                    return Err(Error::Interpolation(format!("Lagrange nodes {i} and {j} coincide at {xi}")));
                }
                l *= (g - xj) / (xi - xj);
            }
        }
        w.push(l);
    }
    Ok(w)
}

/// Mean distance over all sample pairs.
pub fn mean_pairwise_distance(params: &[Vec<f64>]) -> f64 {
    let n = params.len();
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += distance(&params[i], &params[j]);
            count += 1;
        }
    }
    if count == 0 {
        1.0
    } else {
        total / count as f64
    }
}

fn rbf_weights(params: &[Vec<f64>], gamma: &[f64], kernel: RbfKernel, shape: Option<f64>) -> Result<Vec<f64>> {
    let shape = shape.unwrap_or_else(|| mean_pairwise_distance(params));
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::Interpolation(format!("RBF shape {shape} must be positive")));
    }
    let n = params.len();
    let k = Matrix::from_fn(n, n, |i, j| kernel.eval(distance(&params[i], &params[j]), shape));
    let rhs = Matrix::from_fn(n, 1, |i, _| kernel.eval(distance(&params[i], gamma), shape));
    // The kernel matrix is symmetric, so the weights solve K·w = k(γ).
    let w = solve_square(&k, &rhs)
        .map_err(|e| Error::Interpolation(format!("{} kernel matrix is singular: {e}", kernel.name())))?;
    Ok(w.into_vec())
}

fn idw_weights(params: &[Vec<f64>], gamma: &[f64], power: f64) -> Result<Vec<f64>> {
    if !(power > 0.0) {
        return Err(Error::Interpolation(format!("IDW power {power} must be positive")));
    }
    let d: Vec<f64> = params.iter().map(|p| distance(p, gamma)).collect();
    if let Some(hit) = d.iter().position(|&x| x <= IDW_EXACT_TOL) {
        let mut w = vec![0.0; d.len()];
        w[hit] = 1.0;
        return Ok(w);
    }
    let raw: Vec<f64> = d.iter().map(|x| x.powf(-power)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|x| x / total).collect())
}

impl fmt::Display for TangentInterpolator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TangentInterpolator::Lagrange => write!(f, "lagrange"),
            TangentInterpolator::Rbf { kernel, shape: None } => write!(f, "rbf:{}", kernel.name()),
            TangentInterpolator::Rbf { kernel, shape: Some(s) } => write!(f, "rbf:{}:{s}", kernel.name()),
            TangentInterpolator::Idw { power } => write!(f, "idw:{power}"),
        }
    }
}

impl FromStr for TangentInterpolator {
    type Err = Error;

    /// `lagrange`, `rbf[:kernel[:shape]]` or `idw[:power]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Interpolation(format!("cannot parse interpolator {s:?}: {why}"));
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        match parts.as_slice() {
            ["lagrange"] => Ok(TangentInterpolator::Lagrange),
            ["rbf", rest @ ..] if rest.len() <= 2 => {
                let kernel = match rest.first().copied().unwrap_or("gaussian") {
                    "gaussian" => RbfKernel::Gaussian,
                    "thin-plate" => RbfKernel::ThinPlate,
                    "multiquadric" => RbfKernel::Multiquadric,
                    other => return Err(bad(&format!("unknown kernel {other:?}"))),
                };
                let shape = match rest.get(1) {
                    None => None,
                    Some(v) => {
                        let v: f64 = v.parse().map_err(|_| bad("shape is not a number"))?;
                        if !(v > 0.0) {
                            return Err(bad("shape must be positive"));
                        }
                        Some(v)
                    }
                };
                Ok(TangentInterpolator::Rbf { kernel, shape })
            }
            ["idw"] => Ok(TangentInterpolator::Idw { power: 2.0 }),
            ["idw", p] => {
                let power: f64 = p.parse().map_err(|_| bad("power is not a number"))?;
                if !(power > 0.0) {
                    return Err(bad("power must be positive"));
                }
                Ok(TangentInterpolator::Idw { power })
            }
            _ => Err(bad("expected lagrange, rbf[:kernel[:shape]] or idw[:power]")),
        }
    }
}
