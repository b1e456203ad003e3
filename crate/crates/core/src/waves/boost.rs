//! Lorentz boosts of standing waves and linear superpositions of shifted waves.

use std::sync::Arc;

use num_complex::Complex64;

use super::standing::WaveProfile;
use super::FieldSampler;
use crate::error::{DgError, Result};
use crate::physics::StateVec4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    pub v: f64,
    pub delta: f64,
}

impl BoostParams {
    pub fn new(v: f64) -> Result<Self> {
        if !(v.abs() < 1.0) {
            return Err(DgError::Config(format!("boost velocity {v} must satisfy |v| < 1")));
        }
        Ok(BoostParams { v, delta: 1.0 / (1.0 - v * v).sqrt() })
    }

    pub fn identity() -> Self {
        BoostParams { v: 0.0, delta: 1.0 }
    }

    /// B(v) = [[√((δ+1)/2), sgn(v)√((δ−1)/2)], [sgn(v)√((δ−1)/2), √((δ+1)/2)]].
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let d = (0.5 * (self.delta + 1.0)).sqrt();
        let o = self.v.signum() * (0.5 * (self.delta - 1.0)).sqrt();
        let o = if self.v == 0.0 { 0.0 } else { o };
        [[d, o], [o, d]]
    }
}

/// Ψ^tw(t, x, y) = B(v)·Ψ^sw(δ(t − vx), δ(x − vt), y), returned in real form.
pub fn lorentz_boost<F>(standing: F, bp: &BoostParams, t: f64, x: f64, y: f64) -> StateVec4
where
    F: Fn(f64, f64, f64) -> [Complex64; 2],
{
    let ts = bp.delta * (t - bp.v * x);
    let xs = bp.delta * (x - bp.v * t);
    let psi = standing(ts, xs, y);
    let b = bp.matrix();
    StateVec4::from_spinor([b[0][0] * psi[0] + b[0][1] * psi[1], b[1][0] * psi[0] + b[1][1] * psi[1]])
}

/// A boosted standing wave centered at (x0, y0) at t = 0.
#[derive(Debug, Clone)]
pub struct TravellingWave {
    pub profile: Arc<WaveProfile>,
    pub boost: BoostParams,
    pub x0: f64,
    pub y0: f64,
}

impl TravellingWave {
    pub fn new(profile: Arc<WaveProfile>, v: f64, x0: f64, y0: f64) -> Result<Self> {
        Ok(TravellingWave { profile, boost: BoostParams::new(v)?, x0, y0 })
    }
}

impl FieldSampler for TravellingWave {
    fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        lorentz_boost(|t, x, y| self.profile.spinor(t, x, y), &self.boost, t, x - self.x0, y - self.y0)
    }
}

/// Pointwise sum of travelling waves.
#[derive(Debug, Clone, Default)]
pub struct Superposition {
    pub waves: Vec<TravellingWave>,
}

pub fn superpose(waves: Vec<TravellingWave>) -> Superposition {
    Superposition { waves }
}

impl FieldSampler for Superposition {
    fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        self.waves.iter().fold(StateVec4::ZERO, |acc, w| acc + w.sample(t, x, y))
    }
}
