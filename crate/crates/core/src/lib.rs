//! Discontinuous Galerkin solvers for the nonlinear Dirac equation in one and
//! two space dimensions.

pub mod basis;
pub mod cascade;
pub mod config;
pub mod cost;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod field;
pub mod integrators;
pub mod lwdg;
pub mod mesh;
pub mod operator;
pub mod physics;
pub mod presets;
pub mod quadrature;
pub mod solver;
pub mod tsdg;
pub mod waves;

pub use error::{DgError, Result};
pub use field::{DgSpace, DofField, PointJet};
pub use mesh::CartesianMesh;
pub use physics::{PhysParams, StateVec4};
