use super::Fitness;
use crate::bicitsgm::BiRomModel;
use crate::error::{Error, Result};
use crate::interp::TangentInterpolator;
use crate::linalg::Matrix;

/// `γ ↦ −‖F(γ) − T‖²_F / ‖T‖²_F` with `F(γ)` the model's reconstruction.
///
/// Reconstructions lie in `span(B_s) ⊗ span(B_t)` of the model's reduced
/// frames, so the target is projected once, `P = B_sᵀ·T·B_t`, and every
/// evaluation works on frame coordinates:
/// `‖F − T‖² = ‖σ‖² − 2·Σ σ_k·u_kᵀ P v_k + ‖T‖²`.
pub struct ReducedFitness<'a> {
    model: &'a BiRomModel,
    method: TangentInterpolator,
    projected: Matrix,
    target_sq: f64,
}

pub fn reduced_fitness<'a>(
    model: &'a BiRomModel,
    target_field: &Matrix,
    method: TangentInterpolator,
) -> Result<ReducedFitness<'a>> {
    let expected = (model.samples().spatial_dim(), model.samples().temporal_dim());
    if target_field.shape() != expected {
        return Err(Error::ShapeMismatch { op: "reduced_fitness", lhs: expected, rhs: target_field.shape() });
    }
    let target_sq = target_field.frobenius_norm().powi(2);
    if target_sq == 0.0 {
        return Err(Error::GaConfig("target field is identically zero".into()));
    }
    let projected = model.spatial_frame().tr_matmul(target_field).matmul(model.temporal_frame());
    Ok(ReducedFitness { model, method, projected, target_sq })
}

impl ReducedFitness<'_> {
    /// Relative squared misfit `‖F(γ) − T‖²/‖T‖²`.
    pub fn misfit(&self, genes: &[f64]) -> Result<f64> {
        let f = self.model.reduced_query(genes, &self.method)?;
        let m = f.spatial.tr_matmul(&self.projected.matmul(&f.temporal));
        let cross: f64 = f.sigma.iter().enumerate().map(|(k, s)| s * m[(k, k)]).sum();
        let own: f64 = f.sigma.iter().map(|s| s * s).sum();
        Ok(((own - 2.0 * cross + self.target_sq) / self.target_sq).max(0.0))
    }
}

impl Fitness for ReducedFitness<'_> {
    fn evaluate(&self, genes: &[f64]) -> f64 {
        match self.misfit(genes) {
            Ok(m) => -m,
            Err(e) => {
                log::warn!("reduced fitness at {genes:?}: {e}");
                f64::NAN
            }
        }
    }

    fn is_extrapolation(&self, genes: &[f64]) -> bool {
        !self.model.samples().contains(genes)
    }
}
