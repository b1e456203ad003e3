use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diracdg::config::ExperimentConfig;
use diracdg::cost::{compare_schemes, predicted_ops, SchemeFamily};
use diracdg::experiment::{run_experiment, run_study, RunOptions};
use diracdg::presets::{catalog_text, find_preset, preset_catalog};
use diracdg::solver::Scheme;
use diracdg::waves::{solve_standing_wave, SolverOptions};
use diracdg::{DgError, PhysParams};

#[derive(Parser)]
#[command(name = "diracdg", version, about = "DG solvers for the nonlinear Dirac equation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Overrides shared by `run` and `converge`.
#[derive(clap::Args, Clone)]
struct Common {
    /// Output directory (default: the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a single worker thread.
    #[arg(long)]
    deterministic: bool,
    /// CFL number for every scheme.
    #[arg(long)]
    mu: Option<f64>,
    /// Cells: N (both axes) or NxM.
    #[arg(long)]
    cells: Option<String>,
    /// End time.
    #[arg(long)]
    tfinal: Option<f64>,
    /// Run the full-length version instead of the desk-scale default.
    #[arg(long)]
    full: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset or a TOML config file.
    Run {
        target: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<String>,
        /// Polynomial degree.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Mesh-refinement study of a preset or config file.
    Converge {
        target: String,
        #[command(flatten)]
        common: Common,
        /// Worker threads for independent mesh levels.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Comma-separated cells per axis, replacing study.levels.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Predicted operation counts; scheme may be "all".
    Cost { scheme: String, q: usize, gp: u64, j: u64, ntau: u64 },
    /// Solve a standing wave and write its profile.
    Wave {
        omega: f64,
        s: u32,
        kappa: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Truncation radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Chebyshev degree.
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the presets, or print one as TOML.
    Presets {
        #[arg(long)]
        show: Option<String>,
        #[arg(long)]
        full: bool,
    },
}

fn exit_code(e: &DgError) -> u8 {
    match e {
        DgError::Config(_) | DgError::Unsupported(_) | DgError::InsufficientLevels(_) => 2,
        DgError::Blowup { .. } => 3,
        DgError::NoConvergence { .. } => 4,
        DgError::Domain(_) | DgError::Io(_) => 1,
    }
}

fn load(target: &str, full: bool) -> Result<ExperimentConfig, DgError> {
    if let Ok(p) = find_preset(target) {
        return Ok(p.config(full).clone());
    }
    let path = Path::new(target);
    if path.is_file() {
        return ExperimentConfig::load(path);
    }
    let names: Vec<&str> = preset_catalog().iter().map(|p| p.name).collect();
    Err(DgError::Config(format!("'{target}' is neither a preset ({}) nor a config file", names.join(", "))))
}

fn parse_cells(s: &str) -> Result<(usize, usize), DgError> {
    let bad = || DgError::Config(format!("cells: cannot parse '{s}', expected N or NxM"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn configure(target: &str, c: &Common) -> Result<(ExperimentConfig, RunOptions), DgError> {
    if c.deterministic {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let mut cfg = load(target, c.full)?;
    if let Some(mu) = c.mu {
        cfg.mu = Some(mu);
    }
    if let Some(s) = &c.cells {
        let (nx, ny) = parse_cells(s)?;
        cfg.cells.x = nx;
        cfg.cells.y = ny;
    }
    let mut full = c.full;
    if let Some(t) = c.tfinal {
        cfg.time.t_final = t;
        cfg.time.t_full = None;
        full = false;
    }
    // presets already resolved the full-length variant
    if find_preset(target).is_ok() {
        full = false;
    }
    cfg.validate()?;
    Ok((cfg, RunOptions { out_dir: c.out.clone(), full_length: full, write_files: true }))
}

fn run(cmd: Cmd) -> Result<(), DgError> {
    match cmd {
        Cmd::Run { target, common, scheme, degree } => {
            let (mut cfg, opts) = configure(&target, &common)?;
            if let Some(s) = scheme {
                cfg.scheme = Scheme::parse(&s)?;
            }
            if let Some(q) = degree {
                cfg.q = q;
            }
            let out = run_experiment(&cfg, &opts);
            match &out {
                Ok(o) => {
                    let r = &o.report;
                    let cells = if cfg.dim == 1 { cfg.cells.x.to_string() } else { format!("{}x{}", cfg.cells.x, cfg.cells.y) };
                    println!("{}: {} P{} on {cells} cells to t = {}", cfg.name, cfg.scheme, cfg.q, o.field.time);
                    println!("steps {}  max Q_rela {:.3e}  max E_rela {:.3e}", r.steps, r.max_q_rela(), r.max_e_rela());
                    if let Some(e) = r.errors.as_ref().and_then(|e| e.last()) {
                        println!("final L2 {:.4e}  Linf {:.4e}", e.0, e.1);
                    }
                    if let Some(d) = r.dev_rhoq.as_ref() {
                        println!("max dev_rhoQ {:.4e}", d.iter().fold(0.0f64, |a, &b| a.max(b)));
                    }
                    for f in &o.files {
                        println!("wrote {}", f.display());
                    }
                }
                Err(DgError::Blowup { .. }) => eprintln!("partial outputs flushed"),
                Err(_) => {}
            }
            out.map(|_| ())
        }
        Cmd::Converge { target, common, jobs, levels } => {
            let (mut cfg, opts) = configure(&target, &common)?;
            if let Some(l) = levels {
                let lv: Vec<usize> = l
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| DgError::Config(format!("levels: cannot parse '{l}'"))))
                    .collect::<Result<_, _>>()?;
                cfg.study.get_or_insert_with(Default::default).levels = lv;
            }
            let res = run_study(&cfg, &opts, jobs)?;
            for r in &res {
                println!("{} P{}\n{}", r.scheme, r.q, r.table.to_text());
            }
            Ok(())
        }
        Cmd::Cost { scheme, q, gp, j, ntau } => {
            if scheme.eq_ignore_ascii_case("all") {
                print!("{}", compare_schemes(q, gp, j, ntau)?.to_text());
            } else {
                let fam = SchemeFamily::parse(&scheme)?;
                let o = predicted_ops(fam, q, gp, j, ntau)?;
                println!("{} P{q}  Gp={gp}  J={j}  Ntau={ntau}", fam.name());
                println!("adds {}\nmuls {}\nassigns {}\ntotal {}", o.adds, o.muls, o.assigns, o.total());
            }
            Ok(())
        }
        Cmd::Wave { omega, s, kappa, dim, m, lambda, radius, n, max_iter, out } => {
            let p = PhysParams::new(m, lambda, kappa)?;
            let opts = SolverOptions { radius, n, max_iter, ..Default::default() };
            let w = solve_standing_wave(omega, s, &p, dim, &opts)?;
            println!("omega {omega}  S {s}  kappa {kappa}  dim {dim}");
            println!("iterations {}  ODE residual {:.3e}", w.iterations, w.ode_residual());
            println!("max phi {:.6}  |chi(R)|,|phi(R)| {:.3e}", w.max_phi(), w.boundary_value());
            println!("decay rate {:.6} (expected {:.6})", w.decay_rate(), (m * m - omega * omega).sqrt());
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("wave_omega{omega}_S{s}_kappa{kappa}_{dim}d.txt"));
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                w.write_cache(&mut f)?;
                std::io::Write::flush(&mut f)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Cmd::Presets { show, full } => {
            match show {
                Some(name) => print!("{}", find_preset(&name)?.config(full).to_toml()?),
                None => print!("{}", catalog_text()),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
