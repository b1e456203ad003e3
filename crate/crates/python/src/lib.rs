//! Python module `pydiracdg`: standing waves, presets, runs and the cost model.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use diracdg::config::ExperimentConfig;
use diracdg::cost::{predicted_ops as ops, SchemeFamily};
use diracdg::experiment::{run_experiment, run_study, RunOptions};
use diracdg::presets::{find_preset, preset_catalog};
use diracdg::waves::{mms_solution_and_source, solve_standing_wave, SolverOptions};
use diracdg::{DgError, PhysParams};

create_exception!(pydiracdg, DiracError, PyException);
create_exception!(pydiracdg, ConfigError, DiracError);
create_exception!(pydiracdg, BlowupError, DiracError);
create_exception!(pydiracdg, NoConvergenceError, DiracError);

fn err(e: DgError) -> PyErr {
    let msg = e.to_string();
    match e {
        DgError::Config(_) | DgError::Unsupported(_) | DgError::InsufficientLevels(_) => ConfigError::new_err(msg),
        DgError::Blowup { .. } => BlowupError::new_err(msg),
        DgError::NoConvergence { .. } => NoConvergenceError::new_err(msg),
        DgError::Domain(_) | DgError::Io(_) => DiracError::new_err(msg),
    }
}

/// A preset name or TOML text.
fn resolve(config: &str, full: bool) -> Result<ExperimentConfig, DgError> {
    match find_preset(config) {
        Ok(p) => Ok(p.config(full).clone()),
        Err(_) => ExperimentConfig::from_toml(config),
    }
}

/// Solve for a standing wave; returns the radial profile and solver diagnostics.
#[pyfunction]
#[pyo3(signature = (omega, s=0, kappa=1.0, dim=2, m=1.0, lam=0.5, n=256, radius=None))]
#[allow(clippy::too_many_arguments)]
fn standing_wave<'py>(
    py: Python<'py>,
    omega: f64,
    s: u32,
    kappa: f64,
    dim: usize,
    m: f64,
    lam: f64,
    n: usize,
    radius: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = PhysParams::new(m, lam, kappa).map_err(err)?;
    let opts = SolverOptions { n, radius, ..Default::default() };
    let w = py.detach(|| solve_standing_wave(omega, s, &p, dim, &opts)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("r", w.nodes.clone())?;
    d.set_item("phi", w.phi.clone())?;
    d.set_item("chi", w.chi.clone())?;
    d.set_item("iterations", w.iterations)?;
    d.set_item("ode_residual", w.ode_residual())?;
    d.set_item("decay_rate", w.decay_rate())?;
    d.set_item("max_phi", w.max_phi())?;
    Ok(d)
}

/// (adds, multiplications, assignments) predicted for one scheme.
#[pyfunction]
fn predicted_ops(scheme: &str, q: usize, gp: u64, j: u64, ntau: u64) -> PyResult<(u128, u128, u128)> {
    let fam = SchemeFamily::parse(scheme).map_err(err)?;
    let o = ops(fam, q, gp, j, ntau).map_err(err)?;
    Ok((o.adds, o.muls, o.assigns))
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    preset_catalog().iter().map(|p| p.name).collect()
}

#[pyfunction]
#[pyo3(signature = (name, full=false))]
fn preset_toml(name: &str, full: bool) -> PyResult<String> {
    find_preset(name).map_err(err)?.config(full).to_toml().map_err(err)
}

/// Exact manufactured solution and source at one point, each as [u1, u2, u3, u4].
#[pyfunction]
#[pyo3(signature = (t, x, y, c1=1.0, c2=2.0))]
fn mms_point(t: f64, x: f64, y: f64, c1: f64, c2: f64) -> ([f64; 4], [f64; 4]) {
    let (u, r) = mms_solution_and_source(t, x, y, c1, c2);
    (u.0, r.0)
}

/// Run a preset or TOML config. Files are written only when `out_dir` is given.
#[pyfunction]
#[pyo3(signature = (config, tfinal=None, cells=None, out_dir=None, full=false))]
fn run<'py>(
    py: Python<'py>,
    config: &str,
    tfinal: Option<f64>,
    cells: Option<usize>,
    out_dir: Option<String>,
    full: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = resolve(config, full).map_err(err)?;
    if let Some(t) = tfinal {
        cfg.time.t_final = t;
    }
    if let Some(n) = cells {
        cfg.cells.x = n;
        cfg.cells.y = n;
    }
    let opts = RunOptions { write_files: out_dir.is_some(), out_dir: out_dir.map(Into::into), full_length: false };
    let out = py.detach(|| run_experiment(&cfg, &opts)).map_err(err)?;
    let r = out.report;
    let d = PyDict::new(py);
    d.set_item("t", r.times)?;
    d.set_item("Q", r.q)?;
    d.set_item("E", r.e)?;
    d.set_item("Q_rela", r.q_rela)?;
    d.set_item("E_rela", r.e_rela)?;
    d.set_item("steps", r.steps)?;
    if let Some(e) = r.errors {
        d.set_item("L2", e.iter().map(|v| v.0).collect::<Vec<_>>())?;
        d.set_item("Linf", e.iter().map(|v| v.1).collect::<Vec<_>>())?;
    }
    if let Some(v) = r.dev_rhoq {
        d.set_item("dev_rhoQ", v)?;
    }
    if let Some(v) = r.probe {
        d.set_item("probe_rhoQ", v)?;
    }
    d.set_item("files", out.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>())?;
    Ok(d)
}

/// Convergence study: one dict per (scheme, degree) with cells, errors and orders.
#[pyfunction]
#[pyo3(signature = (config, levels=None, jobs=1))]
fn converge<'py>(py: Python<'py>, config: &str, levels: Option<Vec<usize>>, jobs: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = resolve(config, false).map_err(err)?;
    if let Some(l) = levels {
        cfg.study.get_or_insert_with(Default::default).levels = l;
    }
    let opts = RunOptions { write_files: false, ..Default::default() };
    let res = py.detach(|| run_study(&cfg, &opts, jobs)).map_err(err)?;
    res.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("scheme", r.scheme.name())?;
            d.set_item("q", r.q)?;
            d.set_item("cells", r.table.rows.iter().map(|x| x.cells).collect::<Vec<_>>())?;
            d.set_item("l2", r.table.rows.iter().map(|x| x.l2).collect::<Vec<_>>())?;
            d.set_item("linf", r.table.rows.iter().map(|x| x.linf).collect::<Vec<_>>())?;
            d.set_item("l2_order", r.table.rows.iter().map(|x| x.l2_order).collect::<Vec<_>>())?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pydiracdg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(standing_wave, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_ops, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_toml, m)?)?;
    m.add_function(wrap_pyfunction!(mms_point, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    let py = m.py();
    m.add("DiracError", py.get_type::<DiracError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("BlowupError", py.get_type::<BlowupError>())?;
    m.add("NoConvergenceError", py.get_type::<NoConvergenceError>())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_presets_and_toml() {
        assert_eq!(resolve("ex48-breathing", false).unwrap().physics.kappa, 2.0);
        assert_eq!(resolve("dim = 2\nq = 3", false).unwrap().q, 3);
        assert!(matches!(resolve("dim = 3", false), Err(DgError::Config(_))));
    }
}
