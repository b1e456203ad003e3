//! Experiment configuration, stored as TOML.
//!
//! Every field has a default, so a file only needs the keys it changes:
//!
//! ```toml
//! name = "demo"
//! dim = 1
//! scheme = "tsdg"
//! q = 2
//!
//! [cells]
//! x = 200
//!
//! [initial]
//! kind = "travelling"
//! omega = 0.8
//! v = -0.2
//! x0 = 5.0
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DgError, Result};
use crate::integrators::StepControl;
use crate::mesh::CartesianMesh;
use crate::physics::PhysParams;
use crate::solver::Scheme;
use crate::waves::SolverOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub dim: usize,
    pub scheme: Scheme,
    pub q: usize,
    /// CFL number for every scheme; `None` uses `cfl` or the built-in rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Per-scheme CFL numbers keyed by scheme name.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub cfl: BTreeMap<String, f64>,
    pub domain: Domain,
    pub cells: Cells,
    pub time: TimeSpec,
    pub physics: PhysParams,
    pub initial: InitialCondition,
    pub output: OutputSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<Study>,
    pub wave: WaveSolverSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Domain {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cells {
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSpec {
    /// End time of a normal run.
    pub t_final: f64,
    /// End time of a full-length run, for presets whose default is shortened.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_full: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialCondition {
    /// Manufactured solution (c1 φ, c2 φ) with φ = t⁴ exp(−5(x² + y²)) and its source.
    Mms { c1: f64, c2: f64 },
    Standing {
        omega: f64,
        #[serde(default)]
        s: u32,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        y0: f64,
    },
    Travelling {
        omega: f64,
        #[serde(default)]
        s: u32,
        v: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        y0: f64,
    },
    /// Linear superposition of boosted standing waves.
    Superposition { waves: Vec<WaveItem> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveItem {
    pub omega: f64,
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
}

impl InitialCondition {
    /// The waves making up a wave-based initial condition; empty for MMS.
    pub fn waves(&self) -> Vec<WaveItem> {
        match *self {
            InitialCondition::Mms { .. } => vec![],
            InitialCondition::Standing { omega, s, x0, y0 } => vec![WaveItem { omega, s, v: 0.0, x0, y0 }],
            InitialCondition::Travelling { omega, s, v, x0, y0 } => vec![WaveItem { omega, s, v, x0, y0 }],
            InitialCondition::Superposition { ref waves } => waves.clone(),
        }
    }

    /// Whether the initial data evolves into a known exact solution.
    pub fn has_exact_solution(&self) -> bool {
        !matches!(self, InitialCondition::Superposition { waves } if waves.len() != 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
    /// Conservation history cadence in steps.
    pub every: usize,
    /// Snapshot cadence in steps, 0 to disable.
    pub snapshot_every: usize,
    /// Extra snapshot times; the stepper lands on these exactly.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    /// Point where |Ψ|² is recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<[f64; 2]>,
    pub track_error: bool,
    pub track_dev: bool,
}

/// A mesh-refinement study: every scheme and degree on every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Study {
    /// Cells per axis.
    pub levels: Vec<usize>,
    /// Empty: the run's own scheme.
    pub schemes: Vec<Scheme>,
    /// Empty: the run's own degree.
    pub degrees: Vec<usize>,
    /// Report errors divided by the norm of the exact solution.
    pub relative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSolverSpec {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "run".into(),
            dim: 1,
            scheme: Scheme::RkdgRk4,
            q: 3,
            mu: None,
            cfl: BTreeMap::new(),
            domain: Domain::default(),
            cells: Cells::default(),
            time: TimeSpec::default(),
            physics: PhysParams::default(),
            initial: InitialCondition::default(),
            output: OutputSpec::default(),
            study: None,
            wave: WaveSolverSpec::default(),
        }
    }
}

impl Default for Domain {
    fn default() -> Self {
        Domain { x: [-60.0, 60.0], y: [-15.0, 15.0] }
    }
}

impl Default for Cells {
    fn default() -> Self {
        Cells { x: 600, y: 150 }
    }
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec { t_final: 50.0, t_full: None }
    }
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Standing { omega: 0.8, s: 0, x0: 0.0, y0: 0.0 }
    }
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: "out".into(),
            every: 1,
            snapshot_every: 10,
            snapshot_times: vec![],
            probe: None,
            track_error: false,
            track_dev: false,
        }
    }
}

impl Default for Study {
    fn default() -> Self {
        Study { levels: vec![], schemes: vec![Scheme::Lwdg, Scheme::Tsdg, Scheme::RkdgRk4], degrees: vec![1, 2, 3], relative: false }
    }
}

impl Default for WaveSolverSpec {
    fn default() -> Self {
        let o = SolverOptions::default();
        WaveSolverSpec { n: o.n, radius: o.radius, tol: o.tol, damping: o.damping, max_iter: o.max_iter }
    }
}

impl WaveSolverSpec {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { radius: self.radius, n: self.n, tol: self.tol, damping: self.damping, max_iter: self.max_iter, ..Default::default() }
    }
}

/// μ = 0.25 in 1D; in 2D 0.25 for cubic LWDG and 0.5 otherwise.
pub fn default_mu(dim: usize, scheme: Scheme, q: usize) -> f64 {
    if dim == 1 || (scheme == Scheme::Lwdg && q == 3) {
        0.25
    } else {
        0.5
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> DgError {
    DgError::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| DgError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| DgError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Defaults for a 2D run: [−15, 15]² with Δx = Δy = 0.2.
    pub fn default_2d() -> Self {
        ExperimentConfig {
            dim: 2,
            domain: Domain { x: [-15.0, 15.0], y: [-15.0, 15.0] },
            cells: Cells { x: 150, y: 150 },
            ..Default::default()
        }
    }

    /// CFL number for `scheme` at degree `q`: `mu`, then `cfl`, then the built-in rule.
    pub fn mu_for(&self, scheme: Scheme, q: usize) -> f64 {
        self.mu
            .or_else(|| self.cfl.get(scheme.name()).copied())
            .unwrap_or_else(|| default_mu(self.dim, scheme, q))
    }

    pub fn mesh_with(&self, nx: usize, ny: usize) -> Result<CartesianMesh> {
        let d = &self.domain;
        if self.dim == 1 {
            CartesianMesh::new_1d(d.x[0], d.x[1], nx)
        } else {
            CartesianMesh::new_2d((d.x[0], d.x[1]), (d.y[0], d.y[1]), nx, ny)
        }
    }

    pub fn mesh(&self) -> Result<CartesianMesh> {
        self.mesh_with(self.cells.x, self.cells.y)
    }

    pub fn end_time(&self, full_length: bool) -> f64 {
        if full_length {
            self.time.t_full.unwrap_or(self.time.t_final)
        } else {
            self.time.t_final
        }
    }

    pub fn step_control(&self, mesh: &CartesianMesh, scheme: Scheme, q: usize, final_time: f64) -> StepControl {
        StepControl { mu: self.mu_for(scheme, q), q, dim: self.dim, h: mesh.min_h(), final_time, clip_last: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(bad("name", format!("'{}' is not usable as a file prefix", self.name)));
        }
        if self.dim != 1 && self.dim != 2 {
            return Err(bad("dim", format!("must be 1 or 2, got {}", self.dim)));
        }
        if !(1..=3).contains(&self.q) {
            return Err(bad("q", format!("must be 1, 2 or 3, got {}", self.q)));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(bad("mu", format!("must be positive, got {mu}")));
            }
        }
        for (k, &v) in &self.cfl {
            Scheme::parse(k).map_err(|_| bad("cfl", format!("unknown scheme '{k}'")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("cfl.{k}"), format!("must be positive, got {v}")));
            }
        }
        let axes: &[(&str, [f64; 2])] = if self.dim == 1 { &[("domain.x", self.domain.x)] } else { &[("domain.x", self.domain.x), ("domain.y", self.domain.y)] };
        for (f, [a, b]) in axes {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(bad(f, format!("need a < b, got [{a}, {b}]")));
            }
        }
        if self.cells.x == 0 {
            return Err(bad("cells.x", "must be positive"));
        }
        if self.dim == 2 && self.cells.y == 0 {
            return Err(bad("cells.y", "must be positive"));
        }
        if !(self.time.t_final >= 0.0 && self.time.t_final.is_finite()) {
            return Err(bad("time.t_final", format!("must be >= 0, got {}", self.time.t_final)));
        }
        if let Some(t) = self.time.t_full {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad("time.t_full", format!("must be >= 0, got {t}")));
            }
        }
        self.physics.validate().map_err(|e| bad("physics", e))?;
        self.validate_initial()?;
        if self.output.dir.is_empty() {
            return Err(bad("output.dir", "must not be empty"));
        }
        if let Some(t) = self.output.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(bad("output.snapshot_times", format!("bad time {t}")));
        }
        if self.output.track_error && !self.initial.has_exact_solution() {
            return Err(bad("output.track_error", "a superposition of several waves has no exact solution"));
        }
        if let Some(st) = &self.study {
            if st.levels.len() < 2 {
                return Err(bad("study.levels", format!("need at least two levels, got {}", st.levels.len())));
            }
            if st.levels.contains(&0) {
                return Err(bad("study.levels", "levels must be positive"));
            }
            if st.schemes.is_empty() {
                return Err(bad("study.schemes", "empty"));
            }
            if let Some(q) = st.degrees.iter().find(|q| !(1..=3).contains(*q)) {
                return Err(bad("study.degrees", format!("degree {q} not in 1..=3")));
            }
            if st.degrees.is_empty() {
                return Err(bad("study.degrees", "empty"));
            }
            if !self.initial.has_exact_solution() {
                return Err(bad("study", "a convergence study needs an exact solution"));
            }
        }
        if self.wave.n < 8 {
            return Err(bad("wave.n", format!("need at least 8 nodes, got {}", self.wave.n)));
        }
        if !(self.wave.damping > 0.0 && self.wave.damping <= 1.0) {
            return Err(bad("wave.damping", format!("must be in (0, 1], got {}", self.wave.damping)));
        }
        if !(self.wave.tol > 0.0) {
            return Err(bad("wave.tol", "must be positive"));
        }
        if let Some(r) = self.wave.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad("wave.radius", format!("must be positive, got {r}")));
            }
        }
        Ok(())
    }

    fn validate_initial(&self) -> Result<()> {
        if let InitialCondition::Mms { c1, c2 } = self.initial {
            if !(c1.is_finite() && c2.is_finite()) {
                return Err(bad("initial", "c1 and c2 must be finite"));
            }
            if self.dim != 2 {
                return Err(bad("initial.kind", "the manufactured solution is two-dimensional"));
            }
            return Ok(());
        }
        let waves = self.initial.waves();
        if waves.is_empty() {
            return Err(bad("initial.waves", "empty superposition"));
        }
        for (i, w) in waves.iter().enumerate() {
            let f = |k: &str| if matches!(self.initial, InitialCondition::Superposition { .. }) { format!("initial.waves[{i}].{k}") } else { format!("initial.{k}") };
            if !(w.omega > 0.0 && w.omega < self.physics.m) {
                return Err(bad(&f("omega"), format!("must lie in (0, m) = (0, {}), got {}", self.physics.m, w.omega)));
            }
            if !(w.v.abs() < 1.0) {
                return Err(bad(&f("v"), format!("need |v| < 1, got {}", w.v)));
            }
            if self.dim == 1 && w.s != 0 {
                return Err(bad(&f("s"), "vorticity must be 0 in 1D"));
            }
            if !(w.x0.is_finite() && w.y0.is_finite()) {
                return Err(bad(&f("x0"), "offsets must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.physics, PhysParams { m: 1.0, lambda: 0.5, kappa: 1.0 });
        assert_eq!(c.mu_for(Scheme::Lwdg, 3), 0.25);
        let d = ExperimentConfig::default_2d();
        assert_eq!(d.mu_for(Scheme::Lwdg, 3), 0.25);
        assert_eq!(d.mu_for(Scheme::Tsdg, 3), 0.5);
        assert!((d.mesh().unwrap().dx() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default_2d();
        c.name = "pair".into();
        c.cfl.insert("lwdg".into(), 0.3);
        c.initial = InitialCondition::Superposition {
            waves: vec![WaveItem { omega: 0.8, s: 1, v: 0.1, x0: -2.0, y0: 0.5 }, WaveItem { omega: 0.12, s: 0, v: -0.1, x0: 2.0, y0: 0.0 }],
        };
        c.output.probe = Some([0.0, 0.0]);
        c.output.snapshot_times = vec![0.1, 1.0 / 3.0];
        c.study = None;
        c.time.t_full = Some(600.0);
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn dotted_keys_override() {
        let c = ExperimentConfig::from_toml(
            "scheme = \"lwdg\"\nphysics.kappa = 2.0\ncells.x = 50\n[initial]\nkind = \"travelling\"\nomega = 0.6\nv = 0.2\n",
        )
        .unwrap();
        assert_eq!(c.scheme, Scheme::Lwdg);
        assert_eq!(c.physics.kappa, 2.0);
        assert_eq!(c.physics.lambda, 0.5);
        assert_eq!(c.cells.x, 50);
        assert_eq!(c.initial, InitialCondition::Travelling { omega: 0.6, s: 0, v: 0.2, x0: 0.0, y0: 0.0 });
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("dim = 3", "dim"),
            ("q = 4", "q"),
            ("mu = -1.0", "mu"),
            ("domain.x = [1.0, -1.0]", "domain.x"),
            ("cells.x = 0", "cells.x"),
            ("time.t_final = -1.0", "time.t_final"),
            ("physics.lambda = -0.5", "physics"),
            ("[initial]\nkind = \"standing\"\nomega = 1.5", "initial.omega"),
            ("[initial]\nkind = \"travelling\"\nomega = 0.5\nv = 1.0", "initial.v"),
            ("[initial]\nkind = \"mms\"\nc1 = 1.0\nc2 = 2.0", "initial.kind"),
            ("[cfl]\neuler = 0.5", "cfl"),
            ("[study]\nlevels = [10]", "study.levels"),
            ("wave.damping = 0.0", "wave.damping"),
        ];
        for (text, field) in cases {
            match ExperimentConfig::from_toml(text) {
                Err(DgError::Config(msg)) => assert!(msg.starts_with(field), "{text}: {msg}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("scheme = \"euler\"").is_err());
    }

    #[test]
    fn superpositions_have_no_exact_solution() {
        let w = WaveItem { omega: 0.8, s: 0, v: 0.0, x0: 0.0, y0: 0.0 };
        assert!(InitialCondition::Superposition { waves: vec![w] }.has_exact_solution());
        assert!(!InitialCondition::Superposition { waves: vec![w, w] }.has_exact_solution());
        let mut c = ExperimentConfig { initial: InitialCondition::Superposition { waves: vec![w, w] }, ..Default::default() };
        c.output.track_error = true;
        assert!(matches!(c.validate(), Err(DgError::Config(m)) if m.starts_with("output.track_error")));
    }
}
