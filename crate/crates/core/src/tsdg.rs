//! Two-stage fourth-order DG scheme.
//!
//! Stage one sweeps u_h once for 𝔗₁ (flux f, source 𝓜) and 𝔗₂ (flux ∂t f,
//! source ∂t 𝓜); stage two sweeps the intermediate state once for 𝔗₃.

use crate::cascade::{first_order_cascade, Forcing};
use crate::error::{DgError, Result};
use crate::field::{DofField, PointJet};
use crate::integrators::{ts_fourth_step, TwoStageRates};
use crate::operator::{sweep, PointFlux, PointKernel, MAX_OUT};
use crate::physics::{alpha, beta, PhysParams};

pub const DEFAULT_THETA: f64 = 1.0 / 3.0;

/// Which functionals a sweep returns: (𝔗₁, 𝔗₂) or 𝔗₂ alone (used for 𝔗₃ at u*).
pub struct TsKernel<'a> {
    pub params: PhysParams,
    pub time: f64,
    pub forcing: Option<&'a dyn Forcing>,
    pub with_first: bool,
}

impl PointKernel for TsKernel<'_> {
    fn outputs(&self) -> usize {
        if self.with_first {
            2
        } else {
            1
        }
    }

    fn order(&self) -> usize {
        1
    }

    fn eval(&self, jet: &PointJet, x: f64, y: f64, out: &mut [PointFlux; MAX_OUT]) -> Result<()> {
        let src = self.forcing.map(|f| f.bundle(self.time, x, y, 1));
        let b = first_order_cascade(jet, &self.params, src.as_ref())?;
        let (r, r_t) = src.map_or((Default::default(), Default::default()), |s| (s.r, s.r_t));
        let dt = PointFlux { fx: alpha(&b.u_t), fy: beta(&b.u_t), g: b.m_t + r_t };
        if self.with_first {
            out[0] = PointFlux { fx: alpha(&b.u), fy: beta(&b.u), g: b.m + r };
            out[1] = dt;
        } else {
            out[0] = dt;
        }
        Ok(())
    }
}

fn wrap(field: &DofField, coeffs: Vec<f64>) -> DofField {
    DofField { space: field.space.clone(), coeffs, time: field.time }
}

/// Edge-minus-volume functional 𝔗̃ₖ (not divided by the mass).
/// `which` = 1 or 2 evaluates at `field`; 3 evaluates the ∂t-functional at `u_star`.
pub fn assemble_t(
    field: &DofField,
    which: usize,
    u_star: Option<&DofField>,
    p: &PhysParams,
    forcing: Option<&dyn Forcing>,
) -> Result<DofField> {
    let (state, slot, with_first) = match which {
        1 => (field, 0, true),
        2 => (field, 1, true),
        3 => (u_star.ok_or_else(|| DgError::Config("the third functional needs u*".into()))?, 0, false),
        _ => return Err(DgError::Config(format!("no functional number {which}"))),
    };
    let k = TsKernel { params: *p, time: state.time, forcing, with_first };
    let rate = sweep(state, &k)?.swap_remove(slot);
    let s = &state.space;
    let nl = s.n_local();
    let t = rate.iter().enumerate().map(|(i, r)| -r * s.mass[i % nl]).collect();
    Ok(wrap(state, t))
}

/// DG rates 𝓝 = −𝔗̃₁/a and 𝓝ₜ = −𝔗̃₂/a.
pub struct TsRates<'a> {
    pub params: PhysParams,
    pub forcing: Option<&'a dyn Forcing>,
}

impl TwoStageRates<DofField> for TsRates<'_> {
    fn first(&mut self, u: &DofField) -> Result<(DofField, DofField)> {
        let k = TsKernel { params: self.params, time: u.time, forcing: self.forcing, with_first: true };
        let mut r = sweep(u, &k)?;
        let nt = r.pop().unwrap();
        let n = r.pop().unwrap();
        Ok((wrap(u, n), wrap(u, nt)))
    }

    fn second(&mut self, u_star: &DofField) -> Result<DofField> {
        let k = TsKernel { params: self.params, time: u_star.time, forcing: self.forcing, with_first: false };
        Ok(wrap(u_star, sweep(u_star, &k)?.remove(0)))
    }
}

pub fn tsdg_step(
    field: &DofField,
    tau: f64,
    theta: f64,
    p: &PhysParams,
    forcing: Option<&dyn Forcing>,
) -> Result<DofField> {
    let mut rates = TsRates { params: *p, forcing };
    let out = ts_fourth_step(field, tau, theta, &mut rates)?;
    if !out.is_finite() {
        return Err(DgError::Blowup { time: out.time });
    }
    Ok(out)
}
