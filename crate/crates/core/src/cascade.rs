//! Replacement of time derivatives by spatial ones, up to third order in time.
//!
//! With u_t = −αu_x − βu_y + 𝓜(u) + R, every higher time derivative is
//! expressed through spatial derivatives of u, derivatives of g(ρ), and
//! derivatives of an optional external source R.

use crate::basis::{D0, DX, DXX, DXXX, DXXY, DXY, DXYY, DY, DYY, DYYY};
use crate::error::Result;
use crate::field::PointJet;
use crate::physics::{alpha, beta, g_derivatives, gamma, PhysParams, StateVec4};

/// External source R(t, x, y) and the derivatives consumed by the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceBundle {
    pub r: StateVec4,
    pub r_x: StateVec4,
    pub r_y: StateVec4,
    pub r_t: StateVec4,
    pub r_xx: StateVec4,
    pub r_xy: StateVec4,
    pub r_yy: StateVec4,
    pub r_tx: StateVec4,
    pub r_ty: StateVec4,
    pub r_tt: StateVec4,
    pub r_ttt: StateVec4,
}

/// A prescribed source term added to the right-hand side.
pub trait Forcing: Send + Sync {
    /// Source and derivatives at (t, x, y). `order` is the highest time-derivative
    /// order the caller needs (0: R; 1: R, R_t; 3: everything).
    fn bundle(&self, t: f64, x: f64, y: f64, order: usize) -> SourceBundle;
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CascadeBundle {
    pub u: StateVec4,
    pub u_x: StateVec4,
    pub u_y: StateVec4,
    pub u_xx: StateVec4,
    pub u_xy: StateVec4,
    pub u_yy: StateVec4,
    pub u_xxx: StateVec4,
    pub u_xxy: StateVec4,
    pub u_xyy: StateVec4,
    pub u_yyy: StateVec4,

    pub u_t: StateVec4,
    pub u_tx: StateVec4,
    pub u_ty: StateVec4,
    pub u_txx: StateVec4,
    pub u_txy: StateVec4,
    pub u_tyy: StateVec4,
    pub u_tt: StateVec4,
    pub u_ttx: StateVec4,
    pub u_tty: StateVec4,
    pub u_ttt: StateVec4,

    pub rho: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub rho_t: f64,
    pub rho_xx: f64,
    pub rho_xy: f64,
    pub rho_yy: f64,
    pub rho_tx: f64,
    pub rho_ty: f64,
    pub rho_tt: f64,
    pub rho_ttt: f64,

    pub g: f64,
    pub g_x: f64,
    pub g_y: f64,
    pub g_t: f64,
    pub g_xx: f64,
    pub g_xy: f64,
    pub g_yy: f64,
    pub g_tx: f64,
    pub g_ty: f64,
    pub g_tt: f64,
    pub g_ttt: f64,

    pub m: StateVec4,
    pub m_t: StateVec4,
    pub m_tt: StateVec4,
    pub m_ttt: StateVec4,
}

impl CascadeBundle {
    /// Partial bundle holding only the spatial derivatives.
    pub fn from_spatial(j: &PointJet) -> Self {
        CascadeBundle {
            u: j.d[D0],
            u_x: j.d[DX],
            u_y: j.d[DY],
            u_xx: j.d[DXX],
            u_xy: j.d[DXY],
            u_yy: j.d[DYY],
            u_xxx: j.d[DXXX],
            u_xxy: j.d[DXXY],
            u_xyy: j.d[DXYY],
            u_yyy: j.d[DYYY],
            ..Default::default()
        }
    }
}

#[inline]
fn ds(a: &StateVec4, b: &StateVec4) -> f64 {
    a.dot_sigma(b)
}

/// First-order part: u_t, ρ_t, g_t, 𝓜 and ∂t𝓜.
pub fn first_order_cascade(j: &PointJet, p: &PhysParams, src: Option<&SourceBundle>) -> Result<CascadeBundle> {
    let mut b = CascadeBundle::from_spatial(j);
    let zero = SourceBundle::default();
    let s = src.unwrap_or(&zero);
    let u = b.u;
    b.rho = u.dot_sigma(&u);
    let [g, g1, _, _] = g_derivatives(b.rho, p)?;
    b.g = g;
    let gu = gamma(&u);
    b.m = gu * g;
    b.u_t = -alpha(&b.u_x) - beta(&b.u_y) + b.m + s.r;
    b.rho_t = 2.0 * ds(&u, &b.u_t);
    b.g_t = g1 * b.rho_t;
    b.m_t = gu * b.g_t + gamma(&b.u_t) * g;
    Ok(b)
}

/// Full cascade up to third time derivatives.
pub fn build_time_cascade(j: &PointJet, p: &PhysParams, src: Option<&SourceBundle>) -> Result<CascadeBundle> {
    let mut b = CascadeBundle::from_spatial(j);
    let zero = SourceBundle::default();
    let s = src.unwrap_or(&zero);
    let u = b.u;

    // density and its spatial derivatives
    b.rho = ds(&u, &u);
    b.rho_x = 2.0 * ds(&u, &b.u_x);
    b.rho_y = 2.0 * ds(&u, &b.u_y);
    b.rho_xx = 2.0 * (ds(&b.u_x, &b.u_x) + ds(&u, &b.u_xx));
    b.rho_xy = 2.0 * (ds(&b.u_x, &b.u_y) + ds(&u, &b.u_xy));
    b.rho_yy = 2.0 * (ds(&b.u_y, &b.u_y) + ds(&u, &b.u_yy));

    let [g, g1, g2, g3] = g_derivatives(b.rho, p)?;
    b.g = g;
    b.g_x = g1 * b.rho_x;
    b.g_y = g1 * b.rho_y;
    b.g_xx = g2 * b.rho_x * b.rho_x + g1 * b.rho_xx;
    b.g_xy = g2 * b.rho_x * b.rho_y + g1 * b.rho_xy;
    b.g_yy = g2 * b.rho_y * b.rho_y + g1 * b.rho_yy;

    let gu = gamma(&u);
    let gux = gamma(&b.u_x);
    let guy = gamma(&b.u_y);
    b.m = gu * g;
    let m_x = gu * b.g_x + gux * g;
    let m_y = gu * b.g_y + guy * g;
    let m_xx = gu * b.g_xx + gux * (2.0 * b.g_x) + gamma(&b.u_xx) * g;
    let m_xy = gu * b.g_xy + gux * b.g_y + guy * b.g_x + gamma(&b.u_xy) * g;
    let m_yy = gu * b.g_yy + guy * (2.0 * b.g_y) + gamma(&b.u_yy) * g;

    // first time derivative and its spatial derivatives
    b.u_t = -alpha(&b.u_x) - beta(&b.u_y) + b.m + s.r;
    b.u_tx = -alpha(&b.u_xx) - beta(&b.u_xy) + m_x + s.r_x;
    b.u_ty = -alpha(&b.u_xy) - beta(&b.u_yy) + m_y + s.r_y;
    b.u_txx = -alpha(&b.u_xxx) - beta(&b.u_xxy) + m_xx + s.r_xx;
    b.u_txy = -alpha(&b.u_xxy) - beta(&b.u_xyy) + m_xy + s.r_xy;
    b.u_tyy = -alpha(&b.u_xyy) - beta(&b.u_yyy) + m_yy + s.r_yy;

    b.rho_t = 2.0 * ds(&u, &b.u_t);
    b.g_t = g1 * b.rho_t;
    let gut = gamma(&b.u_t);
    b.m_t = gu * b.g_t + gut * g;

    // second time derivative
    b.u_tt = -alpha(&b.u_tx) - beta(&b.u_ty) + b.m_t + s.r_t;

    b.rho_tx = 2.0 * (ds(&b.u_x, &b.u_t) + ds(&u, &b.u_tx));
    b.rho_ty = 2.0 * (ds(&b.u_y, &b.u_t) + ds(&u, &b.u_ty));
    b.g_tx = g2 * b.rho_x * b.rho_t + g1 * b.rho_tx;
    b.g_ty = g2 * b.rho_y * b.rho_t + g1 * b.rho_ty;
    let m_tx = gu * b.g_tx + gux * b.g_t + gut * b.g_x + gamma(&b.u_tx) * g;
    let m_ty = gu * b.g_ty + guy * b.g_t + gut * b.g_y + gamma(&b.u_ty) * g;
    b.u_ttx = -alpha(&b.u_txx) - beta(&b.u_txy) + m_tx + s.r_tx;
    b.u_tty = -alpha(&b.u_txy) - beta(&b.u_tyy) + m_ty + s.r_ty;

    b.rho_tt = 2.0 * (ds(&b.u_t, &b.u_t) + ds(&u, &b.u_tt));
    b.g_tt = g2 * b.rho_t * b.rho_t + g1 * b.rho_tt;
    let gutt = gamma(&b.u_tt);
    b.m_tt = gu * b.g_tt + gut * (2.0 * b.g_t) + gutt * g;

    // third time derivative
    b.u_ttt = -alpha(&b.u_ttx) - beta(&b.u_tty) + b.m_tt + s.r_tt;

    b.rho_ttt = 2.0 * (3.0 * ds(&b.u_t, &b.u_tt) + ds(&u, &b.u_ttt));
    b.g_ttt = g3 * b.rho_t * b.rho_t * b.rho_t + 3.0 * g2 * b.rho_t * b.rho_tt + g1 * b.rho_ttt;
    b.m_ttt = gu * b.g_ttt + gut * (3.0 * b.g_tt) + gutt * (3.0 * b.g_t) + gamma(&b.u_ttt) * g;
    Ok(b)
}

/// Time-integrated fluxes 𝓕 = (Fx, Fy) and source 𝓖 over one step of size τ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LwFluxes {
    pub fx: StateVec4,
    pub fy: StateVec4,
    pub g: StateVec4,
}

pub fn lw_fluxes(b: &CascadeBundle, tau: f64, src: Option<&SourceBundle>) -> LwFluxes {
    let (c1, c2, c3) = (0.5 * tau, tau * tau / 6.0, tau * tau * tau / 24.0);
    let w = b.u + b.u_t * c1 + b.u_tt * c2 + b.u_ttt * c3;
    let mut g = b.m + b.m_t * c1 + b.m_tt * c2 + b.m_ttt * c3;
    if let Some(s) = src {
        g += s.r + s.r_t * c1 + s.r_tt * c2 + s.r_ttt * c3;
    }
    LwFluxes { fx: alpha(&w), fy: beta(&w), g }
}

/// (∂t f, ∂t 𝓜) from the first-order part of a bundle.
pub fn dt_flux_and_source(b: &CascadeBundle) -> ((StateVec4, StateVec4), StateVec4) {
    let dm = gamma(&b.u) * b.g_t + gamma(&b.u_t) * b.g;
    ((alpha(&b.u_t), beta(&b.u_t)), dm)
}
