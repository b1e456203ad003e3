//! Charge and energy functionals, error norms and convergence tables.
//!
//! Pointwise quantities combine the four real components into one Euclidean
//! magnitude. Element contributions are summed in element order, so results do
//! not depend on the thread count.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::basis::{DX, DY};
use crate::error::{DgError, Result};
use crate::field::DofField;
use crate::physics::{rho_of_u, signed_pow, PhysParams, StateVec4};
use crate::quadrature::QuadRule;

/// ρ_Q = Ψ*Ψ.
pub fn charge_density(u: &StateVec4) -> f64 {
    u.norm_sq()
}

/// ρ_E = Im(Ψ*σ₁Ψ_x + Ψ*σ₂Ψ_y) + mρ − λρ^{κ+1} in real form.
pub fn energy_density(u: &StateVec4, ux: &StateVec4, uy: &StateVec4, p: &PhysParams) -> Result<f64> {
    let [u1, u2, u3, u4] = u.0;
    let kin_x = u1 * ux[3] - u3 * ux[1] + u2 * ux[2] - u4 * ux[0];
    let kin_y = -u1 * uy[1] - u3 * uy[3] + u2 * uy[0] + u4 * uy[2];
    let rho = rho_of_u(u);
    Ok(kin_x + kin_y + p.m * rho - p.lambda * rho * signed_pow(rho, p.kappa)?)
}

fn reduce<F>(field: &DofField, per_elem: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    let parts: Vec<Result<f64>> = (0..field.space.mesh.n_elem()).into_par_iter().map(per_elem).collect();
    parts.into_iter().sum()
}

/// Q_h = Σ_K ∫_K Σ_p u_p² by element quadrature.
pub fn charge(field: &DofField) -> f64 {
    reduce(field, |e| Ok(field.integrate_element(e, &[0], |_, _, j| charge_density(&j.value())))).unwrap_or(f64::NAN)
}

/// Q_h from the coefficients: the basis is orthogonal, so Q = Σ a^(l) (u^(l))².
pub fn charge_from_coeffs(field: &DofField) -> f64 {
    let s = &field.space;
    let nl = s.n_local();
    let mut q = 0.0;
    for c in 0..4 {
        for e in 0..s.mesh.n_elem() {
            for l in 0..nl {
                let v = field.get(c, e, l);
                q += s.mass[l] * v * v;
            }
        }
    }
    q
}

/// E_h with derivatives taken from the DG polynomials.
pub fn energy(field: &DofField, p: &PhysParams) -> Result<f64> {
    let derivs = [0, DX, DY];
    reduce(field, |e| {
        let jets = field.vol_jets(e, &derivs);
        let mut s = 0.0;
        for (k, j) in jets.iter().enumerate() {
            s += field.space.vol[k].w * energy_density(&j.d[0], &j.d[DX], &j.d[DY], p)?;
        }
        Ok(s)
    })
}

/// Discrete (L², L∞) of u_h − u on a (q+2)-point Gauss rule per axis.
///
/// The element rule with q+1 points is not used here: the initial projection
/// is computed with it, and at those nodes a projected field interpolates the
/// data, which would hide the projection error.
pub fn error_norms<F>(field: &DofField, exact: F) -> (f64, f64)
where
    F: Fn(f64, f64) -> StateVec4 + Sync,
{
    let s = &field.space;
    let rule = QuadRule::gauss_legendre(s.degree() + 2).expect("rule with at most 5 points");
    let (dx, dy) = (s.mesh.dx(), s.mesh.dy());
    let two_d = s.dim() == 2;
    let mut nodes = Vec::new();
    for (&xi, &wi) in rule.nodes.iter().zip(&rule.weights) {
        if two_d {
            for (&yj, &wj) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push((0.5 * dx * xi, 0.5 * dy * yj, 0.25 * dx * dy * wi * wj));
            }
        } else {
            nodes.push((0.5 * dx * xi, 0.0, 0.5 * dx * wi));
        }
    }
    let nl = s.n_local();
    let table: Vec<Vec<f64>> =
        nodes.iter().map(|&(sx, sy, _)| (0..nl).map(|l| s.basis.eval(l, (0, 0), sx, sy, dx, dy)).collect()).collect();
    let parts: Vec<(f64, f64)> = (0..s.mesh.n_elem())
        .into_par_iter()
        .map(|e| {
            let local = s.gather(&field.coeffs, e);
            let (xc, yc) = s.mesh.center(e);
            let (mut l2, mut li) = (0.0f64, 0.0f64);
            for (k, &(sx, sy, w)) in nodes.iter().enumerate() {
                let mut u = StateVec4::ZERO;
                for c in 0..4 {
                    u.0[c] = (0..nl).map(|l| local[c][l] * table[k][l]).sum();
                }
                let d = (u - exact(xc + sx, yc + sy)).norm_sq();
                l2 += w * d;
                li = li.max(d.sqrt());
            }
            (l2, li)
        })
        .collect();
    let (l2, li) = parts.iter().fold((0.0, 0.0f64), |(a, b), &(x, y)| (a + x, b.max(y)));
    (l2.sqrt(), li)
}

/// Error norms divided by the same discrete norms of the exact field.
pub fn relative_error_norms<F>(field: &DofField, exact: F) -> (f64, f64)
where
    F: Fn(f64, f64) -> StateVec4 + Sync,
{
    let (e2, ei) = error_norms(field, &exact);
    let zero = DofField::zeros(&field.space);
    let (n2, ni) = error_norms(&zero, &exact);
    (e2 / n2, ei / ni)
}

/// max over nodes of ||Ψ(t)|² − |Ψ(0)|²|.
pub fn dev_rhoq(now: &DofField, initial: &DofField) -> Result<f64> {
    if now.coeffs.len() != initial.coeffs.len() || now.space.mesh != initial.space.mesh {
        return Err(DgError::Config("fields live on different meshes".into()));
    }
    let s = &now.space;
    let parts: Vec<f64> = (0..s.mesh.n_elem())
        .into_par_iter()
        .map(|e| {
            let a = now.vol_jets(e, &[0]);
            let b = initial.vol_jets(e, &[0]);
            a.iter()
                .zip(&b)
                .map(|(x, y)| (charge_density(&x.value()) - charge_density(&y.value())).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(parts.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub l2: f64,
    pub linf: f64,
    pub l2_order: Option<f64>,
    pub linf_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

fn order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

/// Orders log(e_J / e_J')/log(J'/J) between successive levels (log₂ when doubling).
pub fn convergence_table(levels: &[(usize, f64, f64)]) -> Result<ConvergenceTable> {
    if levels.len() < 2 {
        return Err(DgError::InsufficientLevels(levels.len()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for (i, &(cells, l2, linf)) in levels.iter().enumerate() {
        let (l2_order, linf_order) = if i == 0 {
            (None, None)
        } else {
            let (c0, a0, b0) = levels[i - 1];
            if cells <= c0 {
                return Err(DgError::Config("mesh levels must increase".into()));
            }
            (Some(order(a0, l2, c0, cells)), Some(order(b0, linf, c0, cells)))
        };
        rows.push(ConvergenceRow { cells, l2, linf, l2_order, linf_order });
    }
    Ok(ConvergenceTable { rows })
}

impl ConvergenceTable {
    /// L² order between the two finest levels.
    pub fn finest_l2_order(&self) -> f64 {
        self.rows.last().and_then(|r| r.l2_order).unwrap_or(f64::NAN)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>8} {:>13} {:>7} {:>13} {:>7}", "J", "L2 error", "order", "Linf error", "order");
        for r in &self.rows {
            let o = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
            let _ = writeln!(
                s,
                "{:>8} {:>13.4e} {:>7} {:>13.4e} {:>7}",
                r.cells,
                r.l2,
                o(r.l2_order),
                r.linf,
                o(r.linf_order)
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("cells,l2,l2_order,linf,linf_order\n");
        for r in &self.rows {
            let o = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
            let _ = writeln!(s, "{},{:.10e},{},{:.10e},{}", r.cells, r.l2, o(r.l2_order), r.linf, o(r.linf_order));
        }
        s
    }
}

/// Time series gathered while advancing a field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub e: Vec<f64>,
    pub q_rela: Vec<f64>,
    pub e_rela: Vec<f64>,
    /// (L², L∞) against an exact solution, when one is known.
    pub errors: Option<Vec<(f64, f64)>>,
    pub dev_rhoq: Option<Vec<f64>>,
    /// |Ψ|² at a probe point.
    pub probe: Option<Vec<f64>>,
    pub steps: usize,
}

fn rela(v: f64, v0: f64) -> f64 {
    if v0 == 0.0 {
        (v - v0).abs()
    } else {
        ((v - v0) / v0).abs()
    }
}

impl RunReport {
    pub fn push(&mut self, t: f64, q: f64, e: f64) {
        let (q0, e0) = (self.q.first().copied().unwrap_or(q), self.e.first().copied().unwrap_or(e));
        self.times.push(t);
        self.q.push(q);
        self.e.push(e);
        self.q_rela.push(if self.q.len() == 1 { 0.0 } else { rela(q, q0) });
        self.e_rela.push(if self.e.len() == 1 { 0.0 } else { rela(e, e0) });
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_q_rela(&self) -> f64 {
        self.q_rela.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn max_e_rela(&self) -> f64 {
        self.e_rela.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut header = String::from("t,Q_h,E_h,Q_rela,E_rela");
        if self.errors.is_some() {
            header.push_str(",L2,Linf");
        }
        if self.dev_rhoq.is_some() {
            header.push_str(",dev_rhoQ");
        }
        if self.probe.is_some() {
            header.push_str(",probe_rhoQ");
        }
        writeln!(w, "{header}")?;
        for i in 0..self.times.len() {
            write!(
                w,
                "{:.10e},{:.15e},{:.15e},{:.6e},{:.6e}",
                self.times[i], self.q[i], self.e[i], self.q_rela[i], self.e_rela[i]
            )?;
            if let Some(er) = &self.errors {
                write!(w, ",{:.10e},{:.10e}", er[i].0, er[i].1)?;
            }
            if let Some(d) = &self.dev_rhoq {
                write!(w, ",{:.10e}", d[i])?;
            }
            if let Some(p) = &self.probe {
                write!(w, ",{:.10e}", p[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
