#![allow(dead_code)]

use grassmann_rom::grassmann::OrthonormalBasis;
use grassmann_rom::itsgm::{SampleSet, SvdTriple};
use grassmann_rom::linalg::{qr_orthonormalize, Matrix};
use grassmann_rom::pod::{compute_pod, TruncationRule};
use grassmann_rom::toyflow::{generate_snapshots, ToyFamily};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn random_basis(n: usize, q: usize, rng: &mut ChaCha8Rng) -> OrthonormalBasis {
    OrthonormalBasis::new(qr_orthonormalize(&gaussian(n, q, rng)).unwrap()).unwrap()
}

pub fn random_orthogonal(q: usize, rng: &mut ChaCha8Rng) -> Matrix {
    qr_orthonormalize(&gaussian(q, q, rng)).unwrap()
}

/// A basis at a controlled distance from `x`: `Exp_x(Δ)` for a random
/// horizontal `Δ` with spectral norm `max_angle`.
pub fn nearby_basis(x: &OrthonormalBasis, max_angle: f64, rng: &mut ChaCha8Rng) -> OrthonormalBasis {
    let (n, q) = x.shape();
    let g = gaussian(n, q, rng);
    let phi = x.matrix();
    let h = &g - &phi.matmul(&phi.tr_matmul(&g));
    let svd = grassmann_rom::linalg::thin_svd(&h).unwrap();
    let angles: Vec<f64> = (0..q).map(|k| max_angle * (1.0 - k as f64 / (q as f64 + 1.0))).collect();
    let cos: Vec<f64> = angles.iter().map(|a| a.cos()).collect();
    let sin: Vec<f64> = angles.iter().map(|a| a.sin()).collect();
    let mut y = phi.matmul(&svd.v.scale_columns(&cos));
    y.add_scaled(1.0, &svd.u.scale_columns(&sin));
    OrthonormalBasis::new(qr_orthonormalize(&y).unwrap()).unwrap()
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Singular values by nalgebra's SVD, non-increasing.
pub fn oracle_singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn relative_error(a: &Matrix, truth: &Matrix) -> f64 {
    (a - truth).frobenius_norm() / truth.frobenius_norm()
}

/// POD triples of the pulse family at `gammas`.
pub fn pulse_samples(family: &ToyFamily, gammas: &[f64], q: usize) -> SampleSet {
    let triples = gammas
        .iter()
        .map(|&g| {
            let pod = compute_pod(&generate_snapshots(family, g).unwrap(), TruncationRule::Rank(q)).unwrap();
            SvdTriple::new(pod.modes, pod.singular_values, OrthonormalBasis::new(pod.temporal).unwrap()).unwrap()
        })
        .collect();
    SampleSet::new(gammas.iter().map(|&g| vec![g]).collect(), triples).unwrap()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
