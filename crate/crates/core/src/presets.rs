//! Named experiment presets.
//!
//! Each preset carries a desk-scale configuration that finishes in minutes and
//! a full-length one at the original resolution and end time. The 1D desk runs
//! differ from the full ones only in T; the 2D desk runs also use a coarser
//! mesh and P² in place of P³.

use crate::config::{Cells, Domain, ExperimentConfig, InitialCondition, OutputSpec, Study, TimeSpec, WaveItem};
use crate::error::{DgError, Result};
use crate::physics::PhysParams;
use crate::solver::Scheme;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub desk: ExperimentConfig,
    pub full: ExperimentConfig,
}

impl Preset {
    pub fn config(&self, full_length: bool) -> &ExperimentConfig {
        if full_length {
            &self.full
        } else {
            &self.desk
        }
    }
}

fn tw(omega: f64, v: f64, x0: f64) -> WaveItem {
    WaveItem { omega, s: 0, v, x0, y0: 0.0 }
}

fn base_1d(name: &str) -> ExperimentConfig {
    ExperimentConfig { name: name.into(), ..Default::default() }
}

fn base_2d(name: &str, half: f64, n: usize, q: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        dim: 2,
        q,
        domain: Domain { x: [-half, half], y: [-half, half] },
        cells: Cells { x: n, y: n },
        ..Default::default()
    }
}

fn with_time(mut c: ExperimentConfig, t: f64, every: usize) -> ExperimentConfig {
    c.time = TimeSpec { t_final: t, t_full: None };
    c.output.every = every;
    c
}

fn snapshots(times: &[f64]) -> OutputSpec {
    OutputSpec { snapshot_every: 0, snapshot_times: times.to_vec(), ..Default::default() }
}

fn ex41() -> Preset {
    let mut c = base_1d("ex41-accuracy");
    c.cells.x = 1000;
    c.initial = InitialCondition::Travelling { omega: 0.8, s: 0, v: -0.2, x0: 5.0, y0: 0.0 };
    c.output = OutputSpec { track_error: true, ..snapshots(&[]) };
    c.study = Some(Study { levels: vec![100, 200, 400, 800], ..Default::default() });
    Preset {
        name: "ex41-accuracy",
        description: "1D travelling wave (omega 4/5, v -1/5, centred at x = 5) to t = 50: mesh-refinement tables for all schemes and the charge and energy history on J = 1000",
        full: c.clone(),
        desk: c,
    }
}

fn ex42() -> Preset {
    let mut c = base_1d("ex42-error-history");
    c.cells.x = 500;
    c.initial = InitialCondition::Standing { omega: 0.8, s: 0, x0: 0.0, y0: 0.0 };
    c.output = OutputSpec { track_error: true, ..snapshots(&[]) };
    c.study = Some(Study { levels: vec![125, 250, 500], degrees: vec![3], ..Default::default() });
    Preset {
        name: "ex42-error-history",
        description: "1D standing wave (omega 4/5) on J = 500: long-time L-infinity error history of each scheme",
        desk: with_time(c.clone(), 300.0, 100),
        full: with_time(c, 3000.0, 500),
    }
}

fn ex43() -> Preset {
    let mut c = base_2d("ex43-mms", 2.0, 40, 2);
    c.scheme = Scheme::Lwdg;
    c.time.t_final = 0.2;
    c.initial = InitialCondition::Mms { c1: 1.0, c2: 2.0 };
    c.output = OutputSpec { track_error: true, ..snapshots(&[0.2]) };
    c.study = Some(Study { levels: vec![20, 40, 80, 160], relative: true, ..Default::default() });
    let mut desk = c.clone();
    if let Some(s) = desk.study.as_mut() {
        s.levels = vec![20, 40, 80];
    }
    Preset {
        name: "ex43-mms",
        description: "2D manufactured solution t^4 exp(-5(x^2+y^2)) with c1 = 1, c2 = 2 on [-2, 2]^2 to t = 0.2: mesh-refinement tables (desk: 20^2 to 80^2, full: to 160^2)",
        desk,
        full: c,
    }
}

fn ex44() -> Preset {
    let mut c = base_1d("ex44-quaternary");
    c.domain.x = [-70.0, 70.0];
    c.cells.x = 1400;
    c.initial = InitialCondition::Superposition { waves: vec![tw(0.6, 0.2, -15.0), tw(0.8, 0.1, -5.0), tw(0.8, -0.1, 5.0), tw(0.6, -0.2, 15.0)] };
    c.output = snapshots(&[]);
    c.output.snapshot_every = 500;
    Preset {
        name: "ex44-quaternary",
        description: "1D collision of four travelling waves on [-70, 70] with J = 1400: charge density and the Q_h, E_h history",
        desk: with_time(c.clone(), 40.0, 10),
        full: with_time(c, 100.0, 10),
    }
}

fn ex45() -> Preset {
    let mk = |n: usize, q: usize, t: f64, every: usize, snaps: &[f64]| {
        let mut c = base_2d("ex45-standing", 15.0, n, q);
        c.mu = Some(0.7);
        c.initial = InitialCondition::Standing { omega: 0.8, s: 0, x0: 0.0, y0: 0.0 };
        c.output = OutputSpec { track_dev: true, ..snapshots(snaps) };
        with_time(c, t, every)
    };
    Preset {
        name: "ex45-standing",
        description: "2D standing wave (omega 0.8; set initial.omega = 0.12 for the second case) with mu = 0.7: dev_rhoQ history and charge-density snapshots",
        desk: mk(40, 2, 100.0, 20, &[50.0, 100.0]),
        full: mk(150, 3, 4000.0, 200, &[800.0, 1200.0, 1600.0, 2000.0, 2600.0, 3200.0, 4000.0]),
    }
}

fn ex46() -> Preset {
    let mk = |half: f64, n: usize, q: usize, t: f64, every: usize| {
        let mut c = base_2d("ex46-oscillation", half, n, q);
        c.initial = InitialCondition::Superposition {
            waves: vec![WaveItem { omega: 0.8, s: 0, v: 0.0, x0: 2.0, y0: 0.0 }, WaveItem { omega: 0.8, s: 0, v: 0.0, x0: -2.0, y0: 0.0 }],
        };
        c.output = OutputSpec { probe: Some([0.0, 0.0]), ..snapshots(&[]) };
        with_time(c, t, every)
    };
    Preset {
        name: "ex46-oscillation",
        description: "2D superposition of two standing waves (omega 0.8) centred at x = -2 and x = 2: central density |Psi(t,0,0)|^2 (desk: [-15, 15]^2 with 40^2 P2 cells to t = 100, full: [-25.5, 25.5]^2 to t = 600)",
        desk: mk(15.0, 40, 2, 100.0, 13),
        full: mk(25.5, 255, 3, 600.0, 70),
    }
}

fn ex47() -> Preset {
    let mk = |n: usize, q: usize| {
        let mut c = base_2d("ex47-travelling", 20.0, n, q);
        c.initial = InitialCondition::Travelling { omega: 0.8, s: 0, v: -0.1, x0: 0.0, y0: 0.0 };
        c.output = snapshots(&[20.0, 40.0, 60.0]);
        with_time(c, 60.0, 20)
    };
    Preset {
        name: "ex47-travelling",
        description: "2D travelling wave (omega 0.8, v -1/10; also run with omega 0.12, v 1/10) on [-20, 20]^2: snapshots at t = 20, 40, 60",
        desk: mk(50, 2),
        full: mk(200, 3),
    }
}

fn ex48() -> Preset {
    let mk = |n: usize, q: usize, t: f64, every: usize| {
        let mut c = base_2d("ex48-breathing", 15.0, n, q);
        c.physics = PhysParams { kappa: 2.0, ..Default::default() };
        c.initial = InitialCondition::Standing { omega: 0.94, s: 0, x0: 0.0, y0: 0.0 };
        c.output = OutputSpec { track_dev: true, probe: Some([0.0, 0.0]), ..snapshots(&[]) };
        c.output.snapshot_every = every * 10;
        with_time(c, t, every)
    };
    Preset {
        name: "ex48-breathing",
        description: "2D standing wave with kappa = 2 and omega = 0.94: breathing of the charge density, recorded as frequent snapshots for an isosurface at 0.1",
        desk: mk(40, 2, 100.0, 20),
        full: mk(150, 3, 300.0, 100),
    }
}

/// All presets, in example order.
pub fn preset_catalog() -> Vec<Preset> {
    vec![ex41(), ex42(), ex43(), ex44(), ex45(), ex46(), ex47(), ex48()]
}

pub fn find_preset(name: &str) -> Result<Preset> {
    preset_catalog()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| DgError::Config(format!("unknown preset '{name}'")))
}

/// One line per preset: name, dim, scheme, degree, desk and full T, description.
pub fn catalog_text() -> String {
    let mut s = String::from("name\tdim\tscheme\tq\tdesk_T\tfull_T\tdescription\n");
    for p in preset_catalog() {
        let d = &p.desk;
        s.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", p.name, d.dim, d.scheme, d.q, d.time.t_final, p.full.time.t_final, p.description));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_valid_presets() {
        let cat = preset_catalog();
        assert_eq!(cat.len(), 8);
        for p in &cat {
            p.desk.validate().unwrap();
            p.full.validate().unwrap();
            assert_eq!(p.desk.name, p.name);
            assert_eq!(p.full.name, p.name);
            assert!(p.desk.time.t_final <= 300.0, "{}", p.name);
            assert!(p.desk.time.t_final <= p.full.time.t_final);
            assert_eq!(ExperimentConfig::from_toml(&p.full.to_toml().unwrap()).unwrap(), p.full);
        }
        assert_eq!(catalog_text().lines().count(), 9);
        assert!(find_preset("ex99").is_err());
    }

    #[test]
    fn breathing_has_kappa_two() {
        let p = find_preset("ex48-breathing").unwrap();
        assert_eq!(p.desk.physics.kappa, 2.0);
        assert!(matches!(p.desk.initial, InitialCondition::Standing { omega, .. } if omega == 0.94));
    }

    #[test]
    fn error_history_uses_a_standing_wave_on_500_cells() {
        let p = find_preset("ex42-error-history").unwrap();
        assert_eq!(p.desk.cells.x, 500);
        assert!(matches!(p.desk.initial, InitialCondition::Standing { .. }));
        assert_eq!(p.full.time.t_final, 3000.0);
    }

    #[test]
    fn accuracy_and_collision_setups() {
        let a = find_preset("ex41-accuracy").unwrap().desk;
        assert_eq!(a.initial, InitialCondition::Travelling { omega: 0.8, s: 0, v: -0.2, x0: 5.0, y0: 0.0 });
        assert_eq!(a.time.t_final, 50.0);
        let st = a.study.unwrap();
        assert_eq!(st.levels, vec![100, 200, 400, 800]);
        assert_eq!(st.schemes.len(), 3);
        assert_eq!(st.degrees, vec![1, 2, 3]);

        let m = find_preset("ex43-mms").unwrap().full;
        assert_eq!(m.domain.x, [-2.0, 2.0]);
        assert_eq!(m.time.t_final, 0.2);
        assert_eq!(m.study.unwrap().levels, vec![20, 40, 80, 160]);

        let c = find_preset("ex44-quaternary").unwrap().desk;
        assert_eq!(c.domain.x, [-70.0, 70.0]);
        assert_eq!(c.cells.x, 1400);
        let xs: Vec<f64> = c.initial.waves().iter().map(|w| w.x0).collect();
        assert_eq!(xs, vec![-15.0, -5.0, 5.0, 15.0]);
    }
}
