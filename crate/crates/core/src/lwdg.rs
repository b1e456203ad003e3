//! One-stage fourth-order Lax-Wendroff DG step.

use crate::cascade::{build_time_cascade, lw_fluxes, Forcing};
use crate::error::{DgError, Result};
use crate::field::{DofField, PointJet};
use crate::operator::{sweep, PointFlux, PointKernel, MAX_OUT};
use crate::physics::PhysParams;

/// Pointwise 𝓕 and 𝓖 over a step of size τ starting at `time`.
pub struct LwKernel<'a> {
    pub params: PhysParams,
    pub time: f64,
    pub tau: f64,
    pub forcing: Option<&'a dyn Forcing>,
}

impl PointKernel for LwKernel<'_> {
    fn outputs(&self) -> usize {
        1
    }

    fn order(&self) -> usize {
        3
    }

    fn eval(&self, jet: &PointJet, x: f64, y: f64, out: &mut [PointFlux; MAX_OUT]) -> Result<()> {
        let src = self.forcing.map(|f| f.bundle(self.time, x, y, 3));
        let b = build_time_cascade(jet, &self.params, src.as_ref())?;
        let f = lw_fluxes(&b, self.tau, src.as_ref());
        out[0] = PointFlux { fx: f.fx, fy: f.fy, g: f.g };
        Ok(())
    }
}

/// u(t+τ) = u(t) + (τ/a) [ ∫(𝓕·∇v + 𝓖 v) − Σ_e ∫ h̃ v ].
pub fn lwdg_step(field: &DofField, tau: f64, p: &PhysParams, forcing: Option<&dyn Forcing>) -> Result<DofField> {
    let k = LwKernel { params: *p, time: field.time, tau, forcing };
    let rate = sweep(field, &k)?.remove(0);
    let coeffs: Vec<f64> = field.coeffs.iter().zip(&rate).map(|(u, r)| u + tau * r).collect();
    let out = DofField { space: field.space.clone(), coeffs, time: field.time + tau };
    if !out.is_finite() {
        return Err(DgError::Blowup { time: out.time });
    }
    Ok(out)
}
