//! Thin singular value decomposition by one-sided (Hestenes) Jacobi
//! rotations.
//!
//! The input is orthogonalized column by column with plane rotations until
//! every pair of working columns is orthogonal to a relative tolerance of
//! `m·ε`. Singular values are the final column norms, left vectors are the
//! normalized columns and the accumulated rotations form the right vectors.
//! The method is slower than bidiagonalization but computes small singular
//! values to high relative accuracy, which the logarithm map depends on.

use super::counters;
use super::matrix::{axpy, dot, Matrix};
use crate::error::{Error, Result};

/// `a = u · diag(sigma) · vᵀ` with `k = min(rows, cols)`.
///
/// `sigma` is sorted non-increasing. The largest-magnitude entry of every
/// column of `u` is non-negative (lowest row wins ties), which makes the
/// factorization deterministic.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl ThinSvd {
    /// `u · diag(sigma) · vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        self.u.scale_columns(&self.sigma).matmul_tr(&self.v)
    }
}

/// Thin SVD with the default cap of `100·k` sweeps.
pub fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    let k = a.rows().min(a.cols());
    thin_svd_with_cap(a, 100 * k.max(1))
}

pub fn thin_svd_with_cap(a: &Matrix, max_sweeps: usize) -> Result<ThinSvd> {
    counters::record_svd(a.rows(), a.cols());
    if a.rows() >= a.cols() {
        let (u, sigma, v) = jacobi(a.to_columns(), a.rows(), max_sweeps)?;
        Ok(finish(u, sigma, v))
    } else {
        // A = (Aᵀ)ᵀ = (U' Σ V'ᵀ)ᵀ = V' Σ U'ᵀ
        let at = a.transpose();
        let (u_t, sigma, v_t) = jacobi(at.to_columns(), at.rows(), max_sweeps)?;
        Ok(finish(v_t, sigma, u_t))
    }
}

type Columns = Vec<Vec<f64>>;

/// Orthogonalizes `cols` (each of length `m`) in place. Returns normalized
/// left vectors, singular values and right vectors, all as columns and in
/// unsorted order.
fn jacobi(mut cols: Columns, m: usize, max_sweeps: usize) -> Result<(Columns, Vec<f64>, Columns)> {
    let n = cols.len();
    let mut v: Columns = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let frob = cols.iter().map(|c| dot(c, c)).sum::<f64>().sqrt();
    let zero = frob * f64::EPSILON;
    let zero_sq = zero * zero;
    let tol = (m as f64).max(1.0) * f64::EPSILON;

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut max_off = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                if alpha <= zero_sq || beta <= zero_sq {
                    continue;
                }
                let gamma = dot(&cols[i], &cols[j]);
                counters::add_flops(6 * m as u64);
                let off = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                max_off = max_off.max(off);
                if off <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut cols, i, j, c, s);
                rotate(&mut v, i, j, c, s);
                counters::add_flops(6 * (m + n) as u64);
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::SvdNonConvergence { sweeps, residual: max_off });
        }
    }

    let mut sigma = Vec::with_capacity(n);
    for c in cols.iter_mut() {
        let norm = dot(c, c).sqrt();
        if norm > zero {
            c.iter_mut().for_each(|x| *x /= norm);
            sigma.push(norm);
        } else {
            c.iter_mut().for_each(|x| *x = 0.0);
            sigma.push(0.0);
        }
    }
    Ok((cols, sigma, v))
}

/// `(col_i, col_j) ← (c·col_i − s·col_j, s·col_i + c·col_j)`.
fn rotate(cols: &mut Columns, i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let (a, b) = (&mut left[i], &mut right[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xi, yi) = (*x, *y);
        *x = c * xi - s * yi;
        *y = s * xi + c * yi;
    }
}

/// Sorts, completes null left vectors, applies the sign convention and
/// packs the factors into matrices.
fn finish(u: Columns, sigma: Vec<f64>, v: Columns) -> ThinSvd {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let mut u: Columns = order.iter().map(|&j| u[j].clone()).collect();
    let mut v: Columns = order.iter().map(|&j| v[j].clone()).collect();
    let sigma: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();

    complete_null_columns(&mut u, &sigma);

    for (uc, vc) in u.iter_mut().zip(v.iter_mut()) {
        if leading_entry(uc) < 0.0 {
            uc.iter_mut().for_each(|x| *x = -*x);
            vc.iter_mut().for_each(|x| *x = -*x);
        }
    }

    ThinSvd {
        u: Matrix::from_columns(&u).expect("finite SVD factors"),
        sigma,
        v: Matrix::from_columns(&v).expect("finite SVD factors"),
    }
}

/// Flips column pairs of `u` and `v` so that the largest-magnitude entry of
/// each column of `u` is non-negative.
pub(crate) fn apply_sign_convention(u: &mut Matrix, v: &mut Matrix) {
    for j in 0..u.cols() {
        if leading_entry(&u.column(j)) < 0.0 {
            for i in 0..u.rows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}

/// Entry of largest magnitude, lowest index on ties.
fn leading_entry(c: &[f64]) -> f64 {
    let mut best = 0.0_f64;
    for &x in c {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    best
}

/// Replaces the left vectors of zero singular values with unit vectors
/// orthogonal to all other columns, taken from the standard basis by
/// Gram–Schmidt.
fn complete_null_columns(u: &mut Columns, sigma: &[f64]) {
    let m = u.first().map_or(0, Vec::len);
    let mut candidate = 0;
    for j in 0..u.len() {
        if sigma[j] > 0.0 {
            continue;
        }
        while candidate < m {
            let mut w = vec![0.0; m];
            w[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (k, other) in u.iter().enumerate() {
                    if k == j || (sigma[k] == 0.0 && k > j) {
                        continue;
                    }
                    let p = dot(other, &w);
                    axpy(-p, other, &mut w);
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > 0.5 {
                w.iter_mut().for_each(|x| *x /= norm);
                u[j] = w;
                break;
            }
        }
    }
}
