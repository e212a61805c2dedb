//! Analytic parametric fields with closed-form answers.

use crate::error::{Error, Result};
use crate::grassmann::OrthonormalBasis;
use crate::linalg::Matrix;

/// Desk-scale defaults used by the command-line tool and the benches.
pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_TIMESTEPS: usize = 128;
pub const DEFAULT_RANK: usize = 8;
pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_PULSE_WIDTH: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToyFamily {
    /// `u(x_j, t_k; γ) = exp(−(x_j − γ·t_k)²/width²)` on uniform grids
    /// `x_j = j/(N−1)`, `t_k = k/(N_t−1)`. The pulse travels at speed `γ`,
    /// which must lie in `[0, 1]` so the centre stays in the domain.
    TranslatingPulse { grid_points: usize, timesteps: usize, width: f64 },
    /// `span{cos(γ)e₁ + sin(γ)e₂, e₃, …, e_{q+1}}` in `ℝᴺ`, a geodesic line
    /// on `G(q, N)`. Snapshots are the basis with columns scaled by
    /// `q, q−1, …, 1`; `γ` must lie in `[−π/2, π/2]`.
    RotatingSubspace { grid_points: usize, rank: usize },
}

impl ToyFamily {
    pub fn pulse(grid_points: usize, timesteps: usize, width: f64) -> Result<Self> {
        let f = ToyFamily::TranslatingPulse { grid_points, timesteps, width };
        f.validate()?;
        Ok(f)
    }

    pub fn rotating(grid_points: usize, rank: usize) -> Result<Self> {
        let f = ToyFamily::RotatingSubspace { grid_points, rank };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ToyFamily::TranslatingPulse { grid_points, timesteps, width } => {
                if grid_points < 2 || timesteps < 2 {
                    return Err(Error::Toy(format!(
                        "pulse needs at least 2 grid points and 2 timesteps, got {grid_points}x{timesteps}"
                    )));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(Error::Toy(format!("pulse width {width} must be positive")));
                }
            }
            ToyFamily::RotatingSubspace { grid_points, rank } => {
                if rank == 0 || grid_points <= rank + 1 {
                    return Err(Error::Toy(format!(
                        "rotating family needs N > q+1 and q ≥ 1, got N={grid_points}, q={rank}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        match self {
            ToyFamily::TranslatingPulse { .. } => (0.0, 1.0),
            ToyFamily::RotatingSubspace { .. } => (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
        }
    }

    fn check_gamma(&self, gamma: f64) -> Result<()> {
        let (lo, hi) = self.gamma_range();
        if !(gamma >= lo && gamma <= hi) {
            return Err(Error::Toy(format!("gamma {gamma} outside [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Snapshot matrix of `family` at `gamma`.
pub fn generate_snapshots(family: &ToyFamily, gamma: f64) -> Result<Matrix> {
    family.validate()?;
    family.check_gamma(gamma)?;
    match *family {
        ToyFamily::TranslatingPulse { grid_points, timesteps, width } => {
            let dx = 1.0 / (grid_points - 1) as f64;
            let dt = 1.0 / (timesteps - 1) as f64;
            Ok(Matrix::from_fn(grid_points, timesteps, |j, k| {
                let s = (j as f64 * dx - gamma * (k as f64 * dt)) / width;
                (-s * s).exp()
            }))
        }
        ToyFamily::RotatingSubspace { rank, .. } => {
            let weights: Vec<f64> = (0..rank).map(|k| (rank - k) as f64).collect();
            Ok(rotating_basis(family, gamma).scale_columns(&weights))
        }
    }
}

fn rotating_basis(family: &ToyFamily, gamma: f64) -> Matrix {
    let ToyFamily::RotatingSubspace { grid_points, rank } = *family else { unreachable!() };
    let (s, c) = gamma.sin_cos();
    Matrix::from_fn(grid_points, rank, |i, k| match (i, k) {
        (0, 0) => c,
        (1, 0) => s,
        (i, k) if k > 0 && i == k + 1 => 1.0,
        _ => 0.0,
    })
}

/// Closed-form basis of the rotating family.
pub fn exact_subspace(family: &ToyFamily, gamma: f64) -> Result<OrthonormalBasis> {
    if !matches!(family, ToyFamily::RotatingSubspace { .. }) {
        return Err(Error::Toy("exact subspaces exist only for the rotating family".into()));
    }
    family.validate()?;
    family.check_gamma(gamma)?;
    OrthonormalBasis::new(rotating_basis(family, gamma))
}
