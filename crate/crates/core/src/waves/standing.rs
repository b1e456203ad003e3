//! Standing waves Ψ = e^{−iωt}(φ e^{iSθ}, iχ e^{i(S+1)θ}) from the radial system
//!
//!   χ' + (S+1)/r χ + (g(ŝ) − ω)φ = 0,
//!   φ' − S/r φ + (g(ŝ) + ω)χ = 0,      ŝ = φ² − χ²,
//!
//! solved by Chebyshev collocation on [0, R] and a damped Newton iteration.
//! In 1D the 1/r terms are absent and the profile is extended with φ even, χ odd.
//!
//! The 2D unknowns are the regular parts a, b with φ = r^S a and χ = r^{S+1} b,
//! which makes the behavior at the origin automatic.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::chebyshev::{bary_eval, bary_weights, diff_matrix, lobatto_nodes};
use crate::error::{DgError, Result};
use crate::physics::{g_derivatives, PhysParams, StateVec4};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Truncation radius; `None` picks 40 in 1D and 30 in 2D.
    pub radius: Option<f64>,
    /// Polynomial degree N (N+1 Lobatto nodes).
    pub n: usize,
    pub max_iter: usize,
    /// Successive-iterate max-norm difference that ends the iteration.
    pub tol: f64,
    /// Relaxation factor s in u ← u + s·δ.
    pub damping: f64,
    /// Once the Newton update is below this size full steps are taken.
    pub full_step_below: f64,
    /// Seed amplitude; `None` uses √(m−ω).
    pub seed_amplitude: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            radius: None,
            n: 256,
            max_iter: 200,
            tol: 1e-12,
            damping: 0.5,
            full_step_below: 1e-3,
            seed_amplitude: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub omega: f64,
    pub s: u32,
    pub dim: usize,
    pub params: PhysParams,
    pub radius: f64,
    /// Lobatto nodes on [0, R].
    pub nodes: Vec<f64>,
    pub phi: Vec<f64>,
    pub chi: Vec<f64>,
    /// Regular parts (equal to φ, χ in 1D).
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Max ODE residual at interior nodes.
    pub residual: f64,
    pub iterations: usize,
    weights: Vec<f64>,
}

/// Per-node coefficients of the collocated system, shared by 1D and 2D.
struct Layout {
    /// ŝ = wa·a² − wb·b²
    wa: Vec<f64>,
    wb: Vec<f64>,
    /// E1 = c1·(Db) + c0·b + (g−ω)a
    c1: Vec<f64>,
    c0: Vec<f64>,
    /// E2 = (Da) + (g+ω)·e·b
    e: Vec<f64>,
    /// 1D pins χ(0) = 0 in place of E1 at the origin.
    pin_origin: bool,
}

fn layout(nodes: &[f64], dim: usize, s: u32) -> Layout {
    let n = nodes.len();
    if dim == 1 {
        return Layout {
            wa: vec![1.0; n],
            wb: vec![1.0; n],
            c1: vec![1.0; n],
            c0: vec![0.0; n],
            e: vec![1.0; n],
            pin_origin: true,
        };
    }
    let s2 = 2 * s as i32;
    Layout {
        wa: nodes.iter().map(|r| r.powi(s2)).collect(),
        wb: nodes.iter().map(|r| r.powi(s2 + 2)).collect(),
        c1: nodes.to_vec(),
        c0: vec![2.0 * (s as f64 + 1.0); n],
        e: nodes.to_vec(),
        pin_origin: false,
    }
}

/// Residual F(U) and, if requested, the Jacobian, with U = [a; b].
fn assemble(
    u: &DVector<f64>,
    d: &[f64],
    lay: &Layout,
    omega: f64,
    p: &PhysParams,
    jac: Option<&mut DMatrix<f64>>,
) -> Result<DVector<f64>> {
    let m = lay.wa.len();
    let n = m - 1;
    let (a, b) = (u.rows(0, m), u.rows(m, m));
    let mut f = DVector::zeros(2 * m);
    let mut g = vec![0.0; m];
    let mut g1 = vec![0.0; m];
    for i in 0..m {
        let sh = lay.wa[i] * a[i] * a[i] - lay.wb[i] * b[i] * b[i];
        let gd = g_derivatives(sh, p)?;
        g[i] = gd[0];
        g1[i] = gd[1];
    }
    for i in 0..m {
        let row = &d[i * m..(i + 1) * m];
        let db: f64 = row.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
        let da: f64 = row.iter().zip(a.iter()).map(|(x, y)| x * y).sum();
        f[i] = if lay.pin_origin && i == 0 {
            b[0]
        } else {
            lay.c1[i] * db + lay.c0[i] * b[i] + (g[i] - omega) * a[i]
        };
        f[m + i] = if i == n { a[n] } else { da + (g[i] + omega) * lay.e[i] * b[i] };
    }
    if let Some(j) = jac {
        j.fill(0.0);
        for i in 0..m {
            let dsa = 2.0 * lay.wa[i] * a[i];
            let dsb = -2.0 * lay.wb[i] * b[i];
            if lay.pin_origin && i == 0 {
                j[(0, m)] = 1.0;
            } else {
                for k in 0..m {
                    j[(i, m + k)] = lay.c1[i] * d[i * m + k];
                }
                j[(i, i)] += (g[i] - omega) + g1[i] * dsa * a[i];
                j[(i, m + i)] += lay.c0[i] + g1[i] * dsb * a[i];
            }
            let r = m + i;
            if i == n {
                j[(r, n)] = 1.0;
            } else {
                for k in 0..m {
                    j[(r, k)] = d[i * m + k];
                }
                let eb = lay.e[i] * b[i];
                j[(r, i)] += g1[i] * dsa * eb;
                j[(r, m + i)] += (g[i] + omega) * lay.e[i] + g1[i] * dsb * eb;
            }
        }
    }
    Ok(f)
}

fn seed(nodes: &[f64], dim: usize, omega: f64, p: &PhysParams, amp: f64) -> DVector<f64> {
    let m = nodes.len();
    let k = (p.m * p.m - omega * omega).sqrt();
    let mut u = DVector::zeros(2 * m);
    for (i, &r) in nodes.iter().enumerate() {
        let sech = 1.0 / (k * r).cosh();
        u[i] = amp * sech;
        // χ ≈ −φ'/(m+ω) from the linearized second equation
        let chi = amp * k * sech * (k * r).tanh() / (p.m + omega);
        u[m + i] = if dim == 1 {
            chi
        } else if r > 0.0 {
            chi / r
        } else {
            amp * k * k / (p.m + omega)
        };
    }
    u
}

/// Solve for a standing-wave profile with frequency ω and vorticity S.
pub fn solve_standing_wave(omega: f64, s: u32, p: &PhysParams, dim: usize, opts: &SolverOptions) -> Result<WaveProfile> {
    p.validate()?;
    if !(omega > 0.0 && omega < p.m) {
        return Err(DgError::Config(format!("frequency {omega} must lie in (0, m = {})", p.m)));
    }
    if dim != 1 && dim != 2 {
        return Err(DgError::Config(format!("dimension must be 1 or 2, got {dim}")));
    }
    if dim == 1 && s != 0 {
        return Err(DgError::Config("vorticity is only defined in 2D".into()));
    }
    if opts.n < 8 || opts.max_iter == 0 || !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(DgError::Config("solver options out of range".into()));
    }
    let radius = opts.radius.unwrap_or(if dim == 1 { 40.0 } else { 30.0 });
    let nodes = lobatto_nodes(opts.n, radius);
    let d = diff_matrix(opts.n, radius);
    let lay = layout(&nodes, dim, s);
    let base = opts.seed_amplitude.unwrap_or((p.m - omega).sqrt());
    let ctx = Ctx { d: &d, lay: &lay, p, opts };
    let mut found = None;
    let mut last_err = DgError::NoConvergence { iterations: 0, residual: f64::NAN };
    for scale in SEED_SCALES {
        match ctx.newton(seed(&nodes, dim, omega, p, scale * base), omega) {
            Ok(r) => {
                found = Some(r);
                break;
            }
            Err(e) => last_err = e,
        }
    }
    if found.is_none() && opts.seed_amplitude.is_none() {
        found = ctx.continuation(&nodes, dim, omega).ok();
    }
    let (u, iterations) = found.ok_or(last_err)?;
    let m = nodes.len();
    let a: Vec<f64> = u.rows(0, m).iter().copied().collect();
    let b: Vec<f64> = u.rows(m, m).iter().copied().collect();
    Ok(WaveProfile::from_regular(omega, s, dim, *p, radius, nodes, a, b, iterations))
}

/// Multiples of the seed amplitude tried before falling back to continuation.
const SEED_SCALES: [f64; 5] = [1.0, 1.25, 1.5, 2.0, 3.0];

struct Ctx<'a> {
    d: &'a [f64],
    lay: &'a Layout,
    p: &'a PhysParams,
    opts: &'a SolverOptions,
}

/// Below this the iterate is the trivial solution.
const TRIVIAL: f64 = 1e-6;
/// Iterates this large are abandoned as divergent.
const DIVERGED: f64 = 1e3;

impl Ctx<'_> {
    fn newton(&self, mut u: DVector<f64>, omega: f64) -> Result<(DVector<f64>, usize)> {
        let dim = u.len();
        let mut jac = DMatrix::zeros(dim, dim);
        let mut last = f64::INFINITY;
        for it in 1..=self.opts.max_iter {
            let f = assemble(&u, self.d, self.lay, omega, self.p, Some(&mut jac))?;
            let delta = jac
                .clone()
                .lu()
                .solve(&(-f))
                .ok_or(DgError::NoConvergence { iterations: it, residual: last })?;
            let size = delta.amax();
            let s = if size < self.opts.full_step_below { 1.0 } else { self.opts.damping };
            u += &delta * s;
            last = size * s;
            if !last.is_finite() || u.amax() > DIVERGED {
                break;
            }
            if last <= self.opts.tol {
                if u.rows(0, dim / 2).amax() < TRIVIAL {
                    return Err(DgError::NoConvergence { iterations: it, residual: last });
                }
                return Ok((u, it));
            }
        }
        Err(DgError::NoConvergence { iterations: self.opts.max_iter, residual: last })
    }

    /// March in ω from a frequency where the plain seed works, reusing each
    /// solution as the next seed.
    fn continuation(&self, nodes: &[f64], dim: usize, target: f64) -> Result<(DVector<f64>, usize)> {
        let p = self.p;
        let mut anchor = None;
        for k in 1..10 {
            let w = p.m * (1.0 - 0.1 * k as f64);
            let amp = (p.m - w).sqrt();
            for scale in SEED_SCALES {
                if let Ok(r) = self.newton(seed(nodes, dim, w, p, scale * amp), w) {
                    anchor = Some((w, r));
                    break;
                }
            }
            if anchor.is_some() {
                break;
            }
        }
        let (mut w, (mut u, mut total)) =
            anchor.ok_or(DgError::NoConvergence { iterations: 0, residual: f64::NAN })?;
        let mut step = 0.05 * p.m;
        while (w - target).abs() > 0.0 {
            let next = if target < w { (w - step).max(target) } else { (w + step).min(target) };
            match self.newton(u.clone(), next) {
                Ok((v, it)) => {
                    u = v;
                    w = next;
                    total += it;
                }
                Err(e) => {
                    step *= 0.5;
                    if step < 1e-4 * p.m {
                        return Err(e);
                    }
                }
            }
        }
        Ok((u, total))
    }
}

impl WaveProfile {
    #[allow(clippy::too_many_arguments)]
    fn from_regular(
        omega: f64,
        s: u32,
        dim: usize,
        params: PhysParams,
        radius: f64,
        nodes: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
        iterations: usize,
    ) -> Self {
        let (phi, chi) = if dim == 1 {
            (a.clone(), b.clone())
        } else {
            (
                nodes.iter().zip(&a).map(|(r, v)| r.powi(s as i32) * v).collect(),
                nodes.iter().zip(&b).map(|(r, v)| r.powi(s as i32 + 1) * v).collect(),
            )
        };
        let weights = bary_weights(nodes.len() - 1);
        let mut w = WaveProfile {
            omega,
            s,
            dim,
            params,
            radius,
            nodes,
            phi,
            chi,
            a,
            b,
            residual: 0.0,
            iterations,
            weights,
        };
        w.residual = w.ode_residual();
        w
    }

    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Max residual of the un-regularized system over interior nodes.
    pub fn ode_residual(&self) -> f64 {
        let m = self.nodes.len();
        let d = diff_matrix(m - 1, self.radius);
        let lay = layout(&self.nodes, self.dim, self.s);
        let u = DVector::from_iterator(2 * m, self.a.iter().chain(&self.b).copied());
        let f = match assemble(&u, &d, &lay, self.omega, &self.params, None) {
            Ok(f) => f,
            Err(_) => return f64::INFINITY,
        };
        let mut worst: f64 = 0.0;
        for i in 1..m - 1 {
            let scale = if self.dim == 1 { 1.0 } else { self.nodes[i].powi(self.s as i32) };
            worst = worst.max((f[i] * scale).abs()).max((f[m + i] * scale).abs());
        }
        worst
    }

    /// Largest |φ|, |χ| over the last node (the truncation boundary).
    pub fn boundary_value(&self) -> f64 {
        let n = self.n();
        self.phi[n].abs().max(self.chi[n].abs())
    }

    pub fn max_phi(&self) -> f64 {
        self.phi.iter().fold(0.0, |x, y| x.max(y.abs()))
    }

    /// (φ(r), χ(r)) for r ≥ 0; zero beyond R.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        if r > self.radius {
            return (0.0, 0.0);
        }
        let a = bary_eval(&self.nodes, &self.weights, &self.a, r);
        let b = bary_eval(&self.nodes, &self.weights, &self.b, r);
        if self.dim == 1 {
            (a, b)
        } else {
            let rs = r.powi(self.s as i32);
            (rs * a, rs * r * b)
        }
    }

    /// Complex spinor of the standing wave at (t, x, y).
    pub fn spinor(&self, t: f64, x: f64, y: f64) -> [Complex64; 2] {
        let rot = Complex64::from_polar(1.0, -self.omega * t);
        let i = Complex64::i();
        if self.dim == 1 {
            let (phi, chi) = self.radial(x.abs());
            let chi = if x < 0.0 { -chi } else { chi };
            return [rot * phi, rot * i * chi];
        }
        let r = x.hypot(y);
        if r > self.radius {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let a = bary_eval(&self.nodes, &self.weights, &self.a, r);
        let b = bary_eval(&self.nodes, &self.weights, &self.b, r);
        // r^S e^{iSθ} = (x+iy)^S keeps the sampler smooth at the origin
        let z = Complex64::new(x, y);
        let zs = z.powu(self.s);
        [rot * zs * a, rot * i * zs * z * b]
    }

    pub fn sample(&self, t: f64, x: f64, y: f64) -> StateVec4 {
        StateVec4::from_spinor(self.spinor(t, x, y))
    }

    /// Least-squares slope of −log φ (1D) or −log(φ√r) (2D) over the far field.
    pub fn decay_rate(&self) -> f64 {
        let peak = self.max_phi();
        let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &r) in self.nodes.iter().enumerate() {
            let v = self.phi[i].abs();
            if r > 0.8 * self.radius || v < 1e-11 * peak || v > 1e-2 * peak {
                continue;
            }
            let y = if self.dim == 1 { v.ln() } else { (v * r.sqrt()).ln() };
            sx += r;
            sy += y;
            sxx += r * r;
            sxy += r * y;
            cnt += 1.0;
        }
        if cnt < 3.0 {
            return f64::NAN;
        }
        -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)
    }

    /// Columnar text: a header with the solve parameters, then r, φ, χ, a, b.
    pub fn write_cache<W: Write>(&self, w: &mut W) -> Result<()> {
        let p = &self.params;
        writeln!(
            w,
            "# omega={:.17e} S={} kappa={:.17e} lambda={:.17e} m={:.17e} R={:.17e} N={} residual={:.6e} dim={}",
            self.omega,
            self.s,
            p.kappa,
            p.lambda,
            p.m,
            self.radius,
            self.n(),
            self.residual,
            self.dim
        )?;
        writeln!(w, "# r phi chi a b")?;
        for i in 0..self.nodes.len() {
            writeln!(
                w,
                "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
                self.nodes[i], self.phi[i], self.chi[i], self.a[i], self.b[i]
            )?;
        }
        Ok(())
    }

    pub fn read_cache<R: BufRead>(r: R) -> Result<Self> {
        let bad = |m: &str| DgError::Config(format!("profile cache: {m}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))??;
        let mut kv = std::collections::HashMap::new();
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                kv.insert(k.to_string(), v.to_string());
            }
        }
        let num = |k: &str| -> Result<f64> {
            kv.get(k).ok_or_else(|| bad(&format!("missing {k}")))?.parse::<f64>().map_err(|_| bad(&format!("bad {k}")))
        };
        let omega = num("omega")?;
        let s = num("S")? as u32;
        let params = PhysParams::new(num("m")?, num("lambda")?, num("kappa")?)?;
        let radius = num("R")?;
        let dim = num("dim").unwrap_or(2.0) as usize;
        let (mut nodes, mut phi, mut chi, mut a, mut b) = (vec![], vec![], vec![], vec![], vec![]);
        for line in lines {
            let line = line?;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("bad number")))
                .collect::<Result<_>>()?;
            if v.len() != 5 {
                return Err(bad("expected 5 columns"));
            }
            nodes.push(v[0]);
            phi.push(v[1]);
            chi.push(v[2]);
            a.push(v[3]);
            b.push(v[4]);
        }
        if nodes.len() < 2 || nodes.len() != num("N")? as usize + 1 {
            return Err(bad("node count does not match header"));
        }
        let weights = bary_weights(nodes.len() - 1);
        let mut w = WaveProfile {
            omega,
            s,
            dim,
            params,
            radius,
            nodes,
            phi,
            chi,
            a,
            b,
            residual: 0.0,
            iterations: 0,
            weights,
        };
        w.residual = w.ode_residual();
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{alpha, beta, g_of_rho, gamma, rho_of_u};

    fn solve(omega: f64, dim: usize) -> WaveProfile {
        solve_standing_wave(omega, 0, &PhysParams::default(), dim, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn one_d_matches_hamiltonian_invariant() {
        let w = solve(0.8, 1);
        assert!(w.residual < 1e-10, "residual {}", w.residual);
        // φ(0)² = (m−ω)/λ for the cubic model
        assert!((w.phi[0] * w.phi[0] - 0.4).abs() < 1e-10);
        let p = PhysParams::default();
        for i in 0..w.nodes.len() {
            let s = w.phi[i].powi(2) - w.chi[i].powi(2);
            let h = p.m * s - p.lambda * s * s - w.omega * (w.phi[i].powi(2) + w.chi[i].powi(2));
            assert!(h.abs() < 1e-10, "i={i} h={h}");
        }
        assert!(w.boundary_value() < 1e-8);
        let k = (1.0f64 - 0.64).sqrt();
        assert!((w.decay_rate() - k).abs() < 0.05 * k);
    }

    /// ∂t u + αu_x + βu_y − g γu by central differences of the sampler.
    fn pde_residual(w: &WaveProfile, t: f64, x: f64, y: f64) -> f64 {
        let h = 1e-4;
        let f = |t, x, y| w.sample(t, x, y);
        let ut = (f(t + h, x, y) - f(t - h, x, y)) * (0.5 / h);
        let ux = (f(t, x + h, y) - f(t, x - h, y)) * (0.5 / h);
        let uy = (f(t, x, y + h) - f(t, x, y - h)) * (0.5 / h);
        let u = f(t, x, y);
        let g = g_of_rho(rho_of_u(&u), &w.params).unwrap();
        let r = ut + alpha(&ux) + beta(&uy) - gamma(&u) * g;
        r.max_abs()
    }

    #[test]
    fn sampled_waves_solve_the_time_dependent_equation() {
        let w1 = solve(0.8, 1);
        for &x in &[-3.1, -0.7, 0.4, 2.5] {
            assert!(pde_residual(&w1, 0.3, x, 0.0) < 1e-7);
        }
        let w2 = solve(0.8, 2);
        for &(x, y) in &[(0.3, -0.2), (1.5, 0.7), (-2.0, 1.1), (0.05, 0.0)] {
            assert!(pde_residual(&w2, 0.3, x, y) < 1e-7, "at {x},{y}");
        }
        let opts = SolverOptions { n: 160, ..Default::default() };
        let w3 = solve_standing_wave(0.8, 1, &PhysParams::default(), 2, &opts).unwrap();
        assert!(w3.residual < 1e-9);
        for &(x, y) in &[(0.3, -0.2), (1.5, 0.7), (-2.0, 1.1)] {
            assert!(pde_residual(&w3, 0.0, x, y) < 1e-7, "at {x},{y}");
        }
    }

    #[test]
    fn amplitude_shrinks_towards_the_mass() {
        let amps: Vec<f64> = [0.8, 0.9, 0.95].iter().map(|&o| solve(o, 1).max_phi()).collect();
        assert!(amps[0] > amps[1] && amps[1] > amps[2], "{amps:?}");
        let amps: Vec<f64> = [0.8, 0.9, 0.95].iter().map(|&o| solve(o, 2).max_phi()).collect();
        assert!(amps[0] > amps[1] && amps[1] > amps[2], "{amps:?}");
    }

    #[test]
    fn rejects_bad_frequency() {
        let p = PhysParams::default();
        let o = SolverOptions::default();
        assert!(matches!(solve_standing_wave(1.2, 0, &p, 1, &o), Err(DgError::Config(_))));
        assert!(matches!(solve_standing_wave(0.0, 0, &p, 2, &o), Err(DgError::Config(_))));
    }

    #[test]
    fn no_convergence_is_reported() {
        let p = PhysParams::default();
        let o = SolverOptions { max_iter: 2, ..Default::default() };
        assert!(matches!(solve_standing_wave(0.8, 0, &p, 1, &o), Err(DgError::NoConvergence { .. })));
    }

    #[test]
    fn cache_round_trip() {
        let opts = SolverOptions { n: 64, radius: Some(20.0), ..Default::default() };
        let w = solve_standing_wave(0.85, 0, &PhysParams::default(), 2, &opts).unwrap();
        let mut buf = Vec::new();
        w.write_cache(&mut buf).unwrap();
        let back = WaveProfile::read_cache(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.nodes, w.nodes);
        assert_eq!(back.b, w.b);
        assert_eq!(back.s, 0);
        assert!((back.residual - w.residual).abs() <= 1e-14);
    }
}
