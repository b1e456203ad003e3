//! Manufactured solution ψ_p = c_p φ with φ = t⁴e^{−5(x²+y²)} and its source
//! R = u_t + αu_x + βu_y − g(ρ)γu.
//!
//! φ and every power of φ are separable products of a power of t and two
//! Gaussians, so all derivatives are products of closed-form 1D derivatives.

use crate::basis::DERIVS;
use crate::cascade::{Forcing, SourceBundle};
use crate::field::PointJet;
use crate::physics::{signed_pow, PhysParams, StateVec4};

use super::FieldSampler;

/// d^k/dt^k t^p.
fn tpow_deriv(p: f64, k: usize, t: f64) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= p - j as f64;
    }
    if c == 0.0 {
        return 0.0;
    }
    c * t.powf(p - k as f64)
}

/// d^k/dz^k e^{−a z²} = (−√a)^k H_k(√a z) e^{−a z²}.
fn gauss_deriv(a: f64, k: usize, z: f64) -> f64 {
    let sa = a.sqrt();
    let s = sa * z;
    let (mut h0, mut h1) = (1.0, 2.0 * s);
    let hk = match k {
        0 => h0,
        _ => {
            for j in 1..k {
                let h2 = 2.0 * s * h1 - 2.0 * j as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    (-sa).powi(k as i32) * hk * (-a * z * z).exp()
}

/// ∂t^nt ∂x^nx ∂y^ny of φ^n.
fn phi_pow_deriv(n: f64, nt: usize, nx: usize, ny: usize, t: f64, x: f64, y: f64) -> f64 {
    tpow_deriv(4.0 * n, nt, t) * gauss_deriv(5.0 * n, nx, x) * gauss_deriv(5.0 * n, ny, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mms {
    pub c1: f64,
    pub c2: f64,
    pub params: PhysParams,
}

impl Default for Mms {
    fn default() -> Self {
        Mms { c1: 1.0, c2: 2.0, params: PhysParams::default() }
    }
}

impl Mms {
    pub fn new(c1: f64, c2: f64, params: PhysParams) -> Self {
        Mms { c1, c2, params }
    }

    /// ∂t^nt ∂x^nx ∂y^ny of the exact field.
    pub fn exact_deriv(&self, nt: usize, nx: usize, ny: usize, t: f64, x: f64, y: f64) -> StateVec4 {
        let f = phi_pow_deriv(1.0, nt, nx, ny, t, x, y);
        StateVec4::new(self.c1 * f, self.c2 * f, 0.0, 0.0)
    }

    pub fn exact(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        self.exact_deriv(0, 0, 0, t, x, y)
    }

    /// Spatial jet of the exact field at time t.
    pub fn jet(&self, t: f64, x: f64, y: f64) -> PointJet {
        let mut j = PointJet::ZERO;
        for (k, &(ax, ay)) in DERIVS.iter().enumerate() {
            j.d[k] = self.exact_deriv(0, ax, ay, t, x, y);
        }
        j
    }

    /// ∂t^nt ∂x^nx ∂y^ny of the source.
    pub fn source_deriv(&self, nt: usize, nx: usize, ny: usize, t: f64, x: f64, y: f64) -> StateVec4 {
        let p = &self.params;
        let (c1, c2) = (self.c1, self.c2);
        let d = |a, b, c| phi_pow_deriv(1.0, a, b, c, t, x, y);
        let ft = d(nt + 1, nx, ny);
        let fx = d(nt, nx + 1, ny);
        let fy = d(nt, nx, ny + 1);
        // g(ρ)φ = mφ − (κ+1)λ(c1²−c2²)^κ φ^{2κ+1}
        let h = -(p.kappa + 1.0) * p.lambda * signed_pow(c1 * c1 - c2 * c2, p.kappa).unwrap_or(f64::NAN);
        let nl = p.m * d(nt, nx, ny) + h * phi_pow_deriv(2.0 * p.kappa + 1.0, nt, nx, ny, t, x, y);
        StateVec4::new(c1 * ft + c2 * fx, c2 * ft + c1 * fx, -c2 * fy + c1 * nl, c1 * fy - c2 * nl)
    }

    pub fn source(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        self.source_deriv(0, 0, 0, t, x, y)
    }
}

/// Exact field and source at (t, x, y) for the default physics.
pub fn mms_solution_and_source(t: f64, x: f64, y: f64, c1: f64, c2: f64) -> (StateVec4, StateVec4) {
    let m = Mms::new(c1, c2, PhysParams::default());
    (m.exact(t, x, y), m.source(t, x, y))
}

impl FieldSampler for Mms {
    fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        self.exact(t, x, y)
    }
}

impl Forcing for Mms {
    fn bundle(&self, t: f64, x: f64, y: f64, order: usize) -> SourceBundle {
        let s = |a, b, c| self.source_deriv(a, b, c, t, x, y);
        let mut b = SourceBundle { r: s(0, 0, 0), ..Default::default() };
        if order >= 1 {
            b.r_t = s(1, 0, 0);
        }
        if order >= 2 {
            b.r_x = s(0, 1, 0);
            b.r_y = s(0, 0, 1);
            b.r_xx = s(0, 2, 0);
            b.r_xy = s(0, 1, 1);
            b.r_yy = s(0, 0, 2);
            b.r_tx = s(1, 1, 0);
            b.r_ty = s(1, 0, 1);
            b.r_tt = s(2, 0, 0);
        }
        if order >= 3 {
            b.r_ttt = s(3, 0, 0);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{alpha, beta, g_of_rho, gamma, rho_of_u};

    #[test]
    fn hermite_derivatives_match_differences() {
        let h = 1e-5;
        for k in 0..4 {
            for &z in &[-0.7, 0.0, 0.31] {
                let fd = (gauss_deriv(5.0, k, z + h) - gauss_deriv(5.0, k, z - h)) / (2.0 * h);
                assert!((fd - gauss_deriv(5.0, k + 1, z)).abs() < 1e-4, "k={k}");
            }
        }
        assert_eq!(tpow_deriv(4.0, 5, 0.3), 0.0);
        assert!((tpow_deriv(4.0, 2, 0.5) - 12.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn spec_values() {
        let (u, r) = mms_solution_and_source(0.0, 0.3, -0.1, 1.0, 2.0);
        assert_eq!(u, StateVec4::ZERO);
        assert_eq!(r, StateVec4::ZERO);
        let (u, _) = mms_solution_and_source(0.2, 0.0, 0.0, 1.0, 2.0);
        assert!((u.to_spinor()[0].norm() - 1.6e-3).abs() < 1e-15);
        assert!((u.to_spinor()[1].norm() - 3.2e-3).abs() < 1e-15);
    }

    #[test]
    fn source_balances_the_equation() {
        let m = Mms::default();
        for &(t, x, y) in &[(0.2, 0.1, -0.3), (0.15, -0.5, 0.25), (0.9, 0.0, 0.4)] {
            let u = m.exact(t, x, y);
            let g = g_of_rho(rho_of_u(&u), &m.params).unwrap();
            let lhs = m.exact_deriv(1, 0, 0, t, x, y)
                + alpha(&m.exact_deriv(0, 1, 0, t, x, y))
                + beta(&m.exact_deriv(0, 0, 1, t, x, y))
                - gamma(&u) * g;
            assert!((lhs - m.source(t, x, y)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn source_derivatives_match_differences() {
        let m = Mms::default();
        let (t, x, y) = (0.5, 0.2, -0.15);
        let h = 1e-5;
        let b = m.bundle(t, x, y, 3);
        let cd = |f: &dyn Fn(f64) -> StateVec4| (f(h) - f(-h)) * (0.5 / h);
        let checks = [
            (cd(&|e| m.source(t + e, x, y)), b.r_t),
            (cd(&|e| m.source(t, x + e, y)), b.r_x),
            (cd(&|e| m.source(t, x, y + e)), b.r_y),
            (cd(&|e| m.source_deriv(0, 1, 0, t, x, y + e)), b.r_xy),
            (cd(&|e| m.source_deriv(1, 0, 0, t, x + e, y)), b.r_tx),
            (cd(&|e| m.source_deriv(2, 0, 0, t + e, x, y)), b.r_ttt),
        ];
        for (k, (fd, an)) in checks.iter().enumerate() {
            assert!((*fd - *an).max_abs() < 1e-6 * (1.0 + an.max_abs()), "check {k}");
        }
    }
}
