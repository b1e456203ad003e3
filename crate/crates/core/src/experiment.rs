//! Running configured experiments and writing their outputs.
//!
//! A run writes into the output directory:
//! - `<name>_conservation.csv`: t, Q_h, E_h, relative differences and the optional columns
//! - `<name>_t<time>.txt`: field snapshots
//! - `<name>_wave<i>.txt`: the standing-wave profiles that built the initial data
//!
//! A convergence study writes `<name>_convergence.txt` and `<name>_convergence.csv`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::cascade::Forcing;
use crate::config::{ExperimentConfig, InitialCondition};
use crate::diagnostics::{convergence_table, error_norms, relative_error_norms, ConvergenceTable, RunReport};
use crate::error::{DgError, Result};
use crate::field::{DgSpace, DofField};
use crate::solver::{advance, Observer, Scheme};
use crate::waves::{solve_standing_wave, superpose, FieldSampler, Mms, TravellingWave, WaveProfile};

/// Initial data and, where it exists, the exact solution.
pub struct Setup {
    pub sampler: Arc<dyn FieldSampler>,
    pub mms: Option<Mms>,
    /// Distinct standing-wave profiles, in first-use order.
    pub profiles: Vec<Arc<WaveProfile>>,
}

/// Solve the standing waves the initial condition needs (each (ω, S) once)
/// and assemble the sampler.
pub fn build_setup(cfg: &ExperimentConfig) -> Result<Setup> {
    if let InitialCondition::Mms { c1, c2 } = cfg.initial {
        let m = Mms::new(c1, c2, cfg.physics);
        return Ok(Setup { sampler: Arc::new(m.clone()), mms: Some(m), profiles: vec![] });
    }
    let opts = cfg.wave.options();
    let mut profiles: Vec<Arc<WaveProfile>> = Vec::new();
    let mut waves = Vec::new();
    for w in cfg.initial.waves() {
        let prof = match profiles.iter().find(|p| p.omega == w.omega && p.s == w.s) {
            Some(p) => p.clone(),
            None => {
                let p = Arc::new(solve_standing_wave(w.omega, w.s, &cfg.physics, cfg.dim, &opts)?);
                profiles.push(p.clone());
                p
            }
        };
        waves.push(TravellingWave::new(prof, w.v, w.x0, w.y0)?);
    }
    let sampler: Arc<dyn FieldSampler> = if waves.len() == 1 { Arc::new(waves.pop().unwrap()) } else { Arc::new(superpose(waves)) };
    Ok(Setup { sampler, mms: None, profiles })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Replaces `output.dir`.
    pub out_dir: Option<PathBuf>,
    /// Run to `time.t_full` instead of `time.t_final`.
    pub full_length: bool,
    pub write_files: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { out_dir: None, full_length: false, write_files: true }
    }
}

impl RunOptions {
    fn dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: RunReport,
    pub field: DofField,
    pub files: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| DgError::Io(format!("{}: {e}", path.display())))
}

fn write_conservation(path: &Path, rep: &RunReport) -> Result<()> {
    let mut w = create(path)?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Run `cfg.scheme` at degree `cfg.q` on `cfg.cells`. A blow-up still writes
/// the conservation history and any snapshots taken before it.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let setup = build_setup(cfg)?;
    let dir = opts.dir(cfg);
    let mut files = Vec::new();
    if opts.write_files {
        std::fs::create_dir_all(&dir).map_err(|e| DgError::Io(format!("{}: {e}", dir.display())))?;
        for (i, p) in setup.profiles.iter().enumerate() {
            let path = dir.join(format!("{}_wave{i}.txt", cfg.name));
            let mut w = create(&path)?;
            p.write_cache(&mut w)?;
            w.flush()?;
            files.push(path);
        }
    }

    let mesh = cfg.mesh()?;
    let space = DgSpace::new(mesh.clone(), cfg.q)?;
    let sampler = setup.sampler.clone();
    let u0 = DofField::project(&space, |x, y| sampler.sample(0.0, x, y));
    let t_end = cfg.end_time(opts.full_length);
    let ctl = cfg.step_control(&mesh, cfg.scheme, cfg.q, t_end);
    let out = &cfg.output;
    let exact: Option<&dyn FieldSampler> = if out.track_error { Some(setup.sampler.as_ref()) } else { None };
    let obs = Observer {
        every: out.every,
        exact,
        track_dev: out.track_dev,
        probe: out.probe.map(|[x, y]| (x, y)),
        stops: &out.snapshot_times,
    };
    let forcing = setup.mms.as_ref().map(|m| m as &dyn Forcing);

    let mut report = RunReport::default();
    let mut snaps = Vec::new();
    let result = advance(&u0, cfg.scheme, &ctl, &cfg.physics, forcing, &obs, &mut report, |k, u| {
        if !opts.write_files {
            return Ok(());
        }
        let by_cadence = out.snapshot_every > 0 && k % out.snapshot_every == 0;
        let by_time = out.snapshot_times.iter().any(|&s| s == u.time);
        if by_cadence || by_time {
            let path = dir.join(format!("{}_t{:.4}.txt", cfg.name, u.time));
            let mut w = create(&path)?;
            u.write_snapshot(&mut w)?;
            w.flush()?;
            snaps.push(path);
        }
        Ok(())
    });
    files.extend(snaps);
    if opts.write_files {
        let path = dir.join(format!("{}_conservation.csv", cfg.name));
        write_conservation(&path, &report)?;
        files.push(path);
    }
    let field = result?;
    Ok(ExperimentOutput { report, field, files })
}

/// One scheme and degree across the study levels.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub scheme: Scheme,
    pub q: usize,
    pub table: ConvergenceTable,
    /// Wall-clock seconds per level.
    pub seconds: Vec<f64>,
}

/// Error at the end time for one scheme, degree and cells-per-axis level.
pub fn level_error(cfg: &ExperimentConfig, setup: &Setup, scheme: Scheme, q: usize, cells: usize, t_end: f64, relative: bool) -> Result<(f64, f64)> {
    let mesh = cfg.mesh_with(cells, cells)?;
    let space = DgSpace::new(mesh.clone(), q)?;
    let s = setup.sampler.as_ref();
    let u0 = DofField::project(&space, |x, y| s.sample(0.0, x, y));
    let ctl = cfg.step_control(&mesh, scheme, q, t_end);
    let forcing = setup.mms.as_ref().map(|m| m as &dyn Forcing);
    let mut rep = RunReport::default();
    let u = advance(&u0, scheme, &ctl, &cfg.physics, forcing, &Observer::default(), &mut rep, |_, _| Ok(()))?;
    let t = u.time;
    Ok(if relative { relative_error_norms(&u, |x, y| s.sample(t, x, y)) } else { error_norms(&u, |x, y| s.sample(t, x, y)) })
}

/// Run the configured study; independent (scheme, degree, level) runs are
/// spread over `jobs` worker threads. Results come back in a fixed order.
pub fn run_study(cfg: &ExperimentConfig, opts: &RunOptions, jobs: usize) -> Result<Vec<StudyResult>> {
    cfg.validate()?;
    let study = cfg.study.clone().ok_or_else(|| DgError::Config(format!("study: preset '{}' has no convergence study", cfg.name)))?;
    let setup = build_setup(cfg)?;
    let t_end = cfg.end_time(opts.full_length);
    let mut tasks = Vec::new();
    // empty lists fall back to the run's own scheme and degree
    let schemes = if study.schemes.is_empty() { vec![cfg.scheme] } else { study.schemes.clone() };
    let degrees = if study.degrees.is_empty() { vec![cfg.q] } else { study.degrees.clone() };
    for &scheme in &schemes {
        for &q in &degrees {
            for &n in &study.levels {
                tasks.push((scheme, q, n));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| DgError::Config(format!("jobs: {e}")))?;
    let runs: Vec<((f64, f64), f64)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(scheme, q, n)| {
                let start = Instant::now();
                level_error(cfg, &setup, scheme, q, n, t_end, study.relative).map(|e| (e, start.elapsed().as_secs_f64()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let nl = study.levels.len();
    let mut results = Vec::new();
    for (i, chunk) in runs.chunks(nl).enumerate() {
        let (scheme, q, _) = tasks[i * nl];
        let levels: Vec<(usize, f64, f64)> = study.levels.iter().zip(chunk).map(|(&n, &((l2, li), _))| (n, l2, li)).collect();
        results.push(StudyResult { scheme, q, table: convergence_table(&levels)?, seconds: chunk.iter().map(|r| r.1).collect() });
    }
    if opts.write_files {
        let dir = opts.dir(cfg);
        std::fs::create_dir_all(&dir).map_err(|e| DgError::Io(format!("{}: {e}", dir.display())))?;
        let kind = if study.relative { "relative" } else { "absolute" };
        let mut text = format!("# {} at t = {t_end}, {kind} errors\n", cfg.name);
        let mut csv = String::from("scheme,q,cells,l2,l2_order,linf,linf_order\n");
        for r in &results {
            text.push_str(&format!("\n{} P{}\n{}", r.scheme, r.q, r.table.to_text()));
            for line in r.table.to_csv().lines().skip(1) {
                csv.push_str(&format!("{},{},{line}\n", r.scheme, r.q));
            }
        }
        std::fs::write(dir.join(format!("{}_convergence.txt", cfg.name)), text)?;
        std::fs::write(dir.join(format!("{}_convergence.csv", cfg.name)), csv)?;
    }
    Ok(results)
}
