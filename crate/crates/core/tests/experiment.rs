use diracdg::config::{ExperimentConfig, InitialCondition};
use diracdg::experiment::{run_experiment, run_study, RunOptions};
use diracdg::presets::preset_catalog;
use diracdg::solver::Scheme;
use diracdg::DgError;

fn small_1d() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        r#"
name = "it"
dim = 1
scheme = "lwdg"
q = 2
cells.x = 200
domain.x = [-20.0, 20.0]
time.t_final = 1.0
output.every = 4
output.snapshot_every = 0
output.snapshot_times = [0.25, 0.7]
output.track_error = true

[initial]
kind = "travelling"
omega = 0.8
v = -0.2
"#,
    )
    .unwrap()
}

fn into(dir: &std::path::Path) -> RunOptions {
    RunOptions { out_dir: Some(dir.to_path_buf()), ..Default::default() }
}

#[test]
fn every_preset_survives_a_toml_round_trip() {
    for p in preset_catalog() {
        for cfg in [&p.desk, &p.full] {
            let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            assert_eq!(&back, cfg, "{}", p.name);
        }
    }
}

#[test]
fn run_writes_history_snapshots_and_wave() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_experiment(&small_1d(), &into(tmp.path())).unwrap();
    assert_eq!(out.field.time, 1.0);
    for f in ["it_conservation.csv", "it_t0.2500.txt", "it_t0.7000.txt", "it_wave0.txt"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let r = &out.report;
    assert!(r.times.contains(&0.25) && r.times.contains(&0.7));
    assert_eq!(*r.times.last().unwrap(), 1.0);
    assert!(r.max_q_rela() < 1e-4, "{} {:?}", r.max_q_rela(), r.errors);
    let e = r.errors.as_ref().unwrap();
    assert!(e.last().unwrap().0 < 1e-3);
}

#[test]
fn no_files_mode_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = RunOptions { write_files: false, ..into(tmp.path()) };
    let out = run_experiment(&small_1d(), &opts).unwrap();
    assert!(out.files.is_empty());
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn blowup_still_writes_the_history() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_1d();
    cfg.mu = Some(20.0);
    cfg.time.t_final = 50.0;
    let err = run_experiment(&cfg, &into(tmp.path())).unwrap_err();
    assert!(matches!(err, DgError::Blowup { .. }), "{err}");
    let csv = std::fs::read_to_string(tmp.path().join("it_conservation.csv")).unwrap();
    assert!(csv.lines().count() >= 2);
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = run_experiment(&small_1d(), &RunOptions { write_files: false, ..Default::default() }).unwrap();
    let b = run_experiment(&small_1d(), &RunOptions { write_files: false, ..Default::default() }).unwrap();
    assert_eq!(a.report.q, b.report.q);
    assert_eq!(a.report.e, b.report.e);
    assert_eq!(a.field.coeffs, b.field.coeffs);
}

#[test]
fn study_orders_and_parallel_agreement() {
    let mut cfg = small_1d();
    let study = cfg.study.get_or_insert_with(Default::default);
    study.levels = vec![50, 100, 200];
    study.schemes = vec![Scheme::Lwdg, Scheme::Tsdg];
    study.degrees = vec![2];
    let tmp = tempfile::tempdir().unwrap();
    let seq = run_study(&cfg, &into(tmp.path()), 1).unwrap();
    let par = run_study(&cfg, &RunOptions { write_files: false, ..Default::default() }, 2).unwrap();
    assert_eq!(seq.len(), 2);
    for (s, p) in seq.iter().zip(&par) {
        assert_eq!(s.table, p.table);
        assert!(s.table.finest_l2_order() > 2.5, "{} {}", s.scheme, s.table.to_text());
    }
    assert!(tmp.path().join("it_convergence.txt").is_file());
    let csv = std::fs::read_to_string(tmp.path().join("it_convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
}

#[test]
fn study_needs_two_levels() {
    let mut cfg = small_1d();
    cfg.study.get_or_insert_with(Default::default).levels = vec![50];
    let err = run_study(&cfg, &RunOptions { write_files: false, ..Default::default() }, 1).unwrap_err();
    assert!(matches!(err, DgError::Config(ref m) if m.starts_with("study.levels")), "{err}");
}

#[test]
fn superposition_has_no_error_tracking() {
    let mut cfg = small_1d();
    if let InitialCondition::Travelling { .. } = cfg.initial {
        cfg.initial = ExperimentConfig::from_toml(
            r#"
[initial]
kind = "superposition"
waves = [{ omega = 0.8, x0 = -3.0 }, { omega = 0.8, x0 = 3.0 }]
"#,
        )
        .unwrap()
        .initial;
    }
    assert!(cfg.validate().is_err());
    cfg.output.track_error = false;
    cfg.domain.x = [-20.0, 20.0];
    let out = run_experiment(&cfg, &RunOptions { write_files: false, ..Default::default() }).unwrap();
    assert!(out.report.errors.is_none());
}
