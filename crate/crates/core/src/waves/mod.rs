//! Initial and exact data: standing waves, boosts, superpositions and the
//! manufactured solution.

pub mod boost;
pub mod chebyshev;
pub mod mms;
pub mod standing;

pub use boost::{lorentz_boost, superpose, BoostParams, Superposition, TravellingWave};
pub use mms::{mms_solution_and_source, Mms};
pub use standing::{solve_standing_wave, SolverOptions, WaveProfile};

use crate::physics::StateVec4;

/// A pointwise space-time field in real form.
pub trait FieldSampler: Send + Sync {
    fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4;
}

impl FieldSampler for WaveProfile {
    fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        WaveProfile::sample(self, t, x, y)
    }
}
