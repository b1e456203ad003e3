//! Real 4-component form of the NLD system.
//!
//! The spinor Ψ = (ψ1, ψ2) is stored as u = (Re ψ1, Re ψ2, Im ψ1, Im ψ2) and
//! obeys ∂t u + α ∂x u + β ∂y u = g(ρ) γ u with ρ = u1² + u3² − u2² − u4².

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DgError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysParams {
    pub m: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams { m: 1.0, lambda: 0.5, kappa: 1.0 }
    }
}

impl PhysParams {
    pub fn new(m: f64, lambda: f64, kappa: f64) -> Result<Self> {
        let p = PhysParams { m, lambda, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return Err(DgError::Config(format!("m must be >= 0, got {}", self.m)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(DgError::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(DgError::Config(format!("kappa must be > 0, got {}", self.kappa)));
        }
        Ok(())
    }

    pub fn integer_kappa(&self) -> Option<i32> {
        if self.kappa.fract() == 0.0 && self.kappa.abs() < 1e6 {
            Some(self.kappa as i32)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVec4(pub [f64; 4]);

impl StateVec4 {
    pub const ZERO: StateVec4 = StateVec4([0.0; 4]);

    pub fn new(u1: f64, u2: f64, u3: f64, u4: f64) -> Self {
        StateVec4([u1, u2, u3, u4])
    }

    pub fn unit(p: usize) -> Self {
        let mut v = [0.0; 4];
        v[p] = 1.0;
        StateVec4(v)
    }

    pub fn dot(&self, o: &StateVec4) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2] + self.0[3] * o.0[3]
    }

    /// Indefinite product Σ (−1)^(p−1) a_p b_p with signs (+, −, +, −).
    pub fn dot_sigma(&self, o: &StateVec4) -> f64 {
        self.0[0] * o.0[0] - self.0[1] * o.0[1] + self.0[2] * o.0[2] - self.0[3] * o.0[3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// (ψ1, ψ2) → (Re ψ1, Re ψ2, Im ψ1, Im ψ2).
    pub fn from_spinor(psi: [Complex64; 2]) -> Self {
        StateVec4([psi[0].re, psi[1].re, psi[0].im, psi[1].im])
    }

    pub fn to_spinor(&self) -> [Complex64; 2] {
        [Complex64::new(self.0[0], self.0[2]), Complex64::new(self.0[1], self.0[3])]
    }
}

impl Index<usize> for StateVec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVec4 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for StateVec4 {
    type Output = StateVec4;
    fn add(self, o: StateVec4) -> StateVec4 {
        StateVec4([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for StateVec4 {
    type Output = StateVec4;
    fn sub(self, o: StateVec4) -> StateVec4 {
        StateVec4([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Neg for StateVec4 {
    type Output = StateVec4;
    fn neg(self) -> StateVec4 {
        StateVec4([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Mul<f64> for StateVec4 {
    type Output = StateVec4;
    fn mul(self, s: f64) -> StateVec4 {
        StateVec4([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

impl Mul<StateVec4> for f64 {
    type Output = StateVec4;
    fn mul(self, v: StateVec4) -> StateVec4 {
        v * self
    }
}

impl AddAssign for StateVec4 {
    fn add_assign(&mut self, o: StateVec4) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl SubAssign for StateVec4 {
    fn sub_assign(&mut self, o: StateVec4) {
        for i in 0..4 {
            self.0[i] -= o.0[i];
        }
    }
}

/// Constant matrices of the real form, α = blockdiag(σ1, σ1).
pub struct DiracMatrices;

impl DiracMatrices {
    pub const ALPHA: [[f64; 4]; 4] = [
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    pub const BETA: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ];
    pub const GAMMA: [[f64; 4]; 4] = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ];

    pub fn apply(m: &[[f64; 4]; 4], u: &StateVec4) -> StateVec4 {
        let mut out = [0.0; 4];
        for (i, row) in m.iter().enumerate() {
            out[i] = row[0] * u.0[0] + row[1] * u.0[1] + row[2] * u.0[2] + row[3] * u.0[3];
        }
        StateVec4(out)
    }
}

#[inline]
pub fn alpha(u: &StateVec4) -> StateVec4 {
    StateVec4([u.0[1], u.0[0], u.0[3], u.0[2]])
}

#[inline]
pub fn beta(u: &StateVec4) -> StateVec4 {
    StateVec4([u.0[3], -u.0[2], -u.0[1], u.0[0]])
}

#[inline]
pub fn gamma(u: &StateVec4) -> StateVec4 {
    StateVec4([u.0[2], -u.0[3], -u.0[0], u.0[1]])
}

#[inline]
pub fn rho_of_u(u: &StateVec4) -> f64 {
    u.0[0] * u.0[0] + u.0[2] * u.0[2] - u.0[1] * u.0[1] - u.0[3] * u.0[3]
}

/// ρ^k with the signed-power convention: integer k accepts negative ρ.
pub fn signed_pow(rho: f64, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Ok(1.0);
    }
    if k.fract() == 0.0 && k.abs() < 1e6 {
        let mut r = rho;
        if k < 0.0 && r.abs() < 1e-300 {
            r = if r < 0.0 { -1e-300 } else { 1e-300 };
        }
        return Ok(r.powi(k as i32));
    }
    if rho < 0.0 {
        return Err(DgError::Domain(format!(
            "negative density {rho:e} raised to non-integer power {k}"
        )));
    }
    let r = if k < 0.0 { rho.max(1e-300) } else { rho };
    Ok(r.powf(k))
}

pub fn g_of_rho(rho: f64, p: &PhysParams) -> Result<f64> {
    Ok(p.m - (p.kappa + 1.0) * p.lambda * signed_pow(rho, p.kappa)?)
}

/// g and its first three derivatives with respect to ρ.
///
/// Terms carrying a factor (κ−1) or (κ−1)(κ−2) are dropped when that factor
/// is zero, so ρ is never raised to a negative power for κ = 1 or κ = 2.
pub fn g_derivatives(rho: f64, p: &PhysParams) -> Result<[f64; 4]> {
    let k = p.kappa;
    let c = (k + 1.0) * p.lambda;
    let g0 = p.m - c * signed_pow(rho, k)?;
    let g1 = -c * k * signed_pow(rho, k - 1.0)?;
    let g2 = if k == 1.0 {
        0.0
    } else {
        -c * k * (k - 1.0) * signed_pow(rho, k - 2.0)?
    };
    let g3 = if k == 1.0 || k == 2.0 {
        0.0
    } else {
        -c * k * (k - 1.0) * (k - 2.0) * signed_pow(rho, k - 3.0)?
    };
    Ok([g0, g1, g2, g3])
}

pub fn source_m(u: &StateVec4, p: &PhysParams) -> Result<StateVec4> {
    let g = g_of_rho(rho_of_u(u), p)?;
    Ok(gamma(u) * g)
}

/// Linear flux f(u) = (αu, βu).
pub fn flux_f(u: &StateVec4) -> (StateVec4, StateVec4) {
    (alpha(u), beta(u))
}
