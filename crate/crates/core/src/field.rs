//! Discrete space (mesh + basis + quadrature tables) and DG coefficient fields.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::{DgBasis, DERIVS};
use crate::error::Result;
use crate::mesh::CartesianMesh;
use crate::physics::StateVec4;
use crate::quadrature::QuadRule;

pub const MAX_LOCAL: usize = 10;
pub const N_DERIV: usize = 10;

/// Pointwise value and spatial derivatives up to third order, indexed like `basis::DERIVS`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointJet {
    pub d: [StateVec4; N_DERIV],
}

impl PointJet {
    pub const ZERO: PointJet = PointJet { d: [StateVec4::ZERO; N_DERIV] };

    pub fn value(&self) -> StateVec4 {
        self.d[0]
    }
}

/// A face node: offset along the face from its midpoint, and physical weight.
#[derive(Debug, Clone, Copy)]
pub struct FaceNode {
    pub s: f64,
    pub w: f64,
}

/// A volume quadrature node: offsets from the element center and physical weight.
#[derive(Debug, Clone, Copy)]
pub struct VolNode {
    pub sx: f64,
    pub sy: f64,
    pub w: f64,
}

#[derive(Debug)]
pub struct DgSpace {
    pub mesh: CartesianMesh,
    pub basis: DgBasis,
    pub rule: QuadRule,
    pub mass: Vec<f64>,
    pub vol: Vec<VolNode>,
    pub xface: Vec<FaceNode>,
    pub yface: Vec<FaceNode>,
    vol_tab: Vec<f64>,
    xface_lo: Vec<f64>,
    xface_hi: Vec<f64>,
    yface_lo: Vec<f64>,
    yface_hi: Vec<f64>,
    sweeps: AtomicUsize,
}

fn tabulate(basis: &DgBasis, pts: &[(f64, f64)], dx: f64, dy: f64) -> Vec<f64> {
    let nl = basis.n_local();
    let mut t = vec![0.0; pts.len() * nl * N_DERIV];
    for (p, &(sx, sy)) in pts.iter().enumerate() {
        for l in 0..nl {
            for (d, &der) in DERIVS.iter().enumerate() {
                t[(p * nl + l) * N_DERIV + d] = basis.eval(l, der, sx, sy, dx, dy);
            }
        }
    }
    t
}

impl DgSpace {
    pub fn new(mesh: CartesianMesh, degree: usize) -> Result<Arc<Self>> {
        let basis = DgBasis::new(mesh.dim, degree)?;
        let rule = QuadRule::for_degree(degree)?;
        let (dx, dy) = (mesh.dx(), mesh.dy());
        let mass = basis.mass_diag(dx, dy);
        let mut vol = Vec::new();
        let mut xface = Vec::new();
        let mut yface = Vec::new();
        if mesh.dim == 1 {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                vol.push(VolNode { sx: 0.5 * dx * x, sy: 0.0, w: 0.5 * dx * w });
            }
            xface.push(FaceNode { s: 0.0, w: 1.0 });
        } else {
            for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
                for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
                    vol.push(VolNode { sx: 0.5 * dx * x, sy: 0.5 * dy * y, w: 0.25 * dx * dy * wx * wy });
                }
            }
            for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
                xface.push(FaceNode { s: 0.5 * dy * s, w: 0.5 * dy * w });
                yface.push(FaceNode { s: 0.5 * dx * s, w: 0.5 * dx * w });
            }
        }
        let vp: Vec<(f64, f64)> = vol.iter().map(|v| (v.sx, v.sy)).collect();
        let xlo: Vec<(f64, f64)> = xface.iter().map(|f| (-0.5 * dx, f.s)).collect();
        let xhi: Vec<(f64, f64)> = xface.iter().map(|f| (0.5 * dx, f.s)).collect();
        let ylo: Vec<(f64, f64)> = yface.iter().map(|f| (f.s, -0.5 * dy)).collect();
        let yhi: Vec<(f64, f64)> = yface.iter().map(|f| (f.s, 0.5 * dy)).collect();
        Ok(Arc::new(DgSpace {
            vol_tab: tabulate(&basis, &vp, dx, dy),
            xface_lo: tabulate(&basis, &xlo, dx, dy),
            xface_hi: tabulate(&basis, &xhi, dx, dy),
            yface_lo: tabulate(&basis, &ylo, dx, dy),
            yface_hi: tabulate(&basis, &yhi, dx, dy),
            mesh,
            basis,
            rule,
            mass,
            vol,
            xface,
            yface,
            sweeps: AtomicUsize::new(0),
        }))
    }

    pub fn n_local(&self) -> usize {
        self.basis.n_local()
    }

    pub fn n_dofs(&self) -> usize {
        4 * self.mesh.n_elem() * self.n_local()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim
    }

    #[inline]
    pub fn idx(&self, c: usize, e: usize, l: usize) -> usize {
        (c * self.mesh.n_elem() + e) * self.n_local() + l
    }

    pub fn vol_row(&self, p: usize) -> &[f64] {
        let n = self.n_local() * N_DERIV;
        &self.vol_tab[p * n..(p + 1) * n]
    }

    /// Basis table at x-face node k, seen from the element on the left (`hi`) or right (`lo`).
    pub fn xface_row(&self, k: usize, hi: bool) -> &[f64] {
        let n = self.n_local() * N_DERIV;
        let t = if hi { &self.xface_hi } else { &self.xface_lo };
        &t[k * n..(k + 1) * n]
    }

    pub fn yface_row(&self, k: usize, hi: bool) -> &[f64] {
        let n = self.n_local() * N_DERIV;
        let t = if hi { &self.yface_hi } else { &self.yface_lo };
        &t[k * n..(k + 1) * n]
    }

    pub fn record_sweep(&self) {
        self.sweeps.fetch_add(1, Ordering::Relaxed);
    }

    /// Number of spatial-operator sweeps performed on this space.
    pub fn sweep_count(&self) -> usize {
        self.sweeps.load(Ordering::Relaxed)
    }

    /// Local coefficients of element e, as [component][l].
    #[inline]
    pub fn gather(&self, coeffs: &[f64], e: usize) -> [[f64; MAX_LOCAL]; 4] {
        let nl = self.n_local();
        let mut out = [[0.0; MAX_LOCAL]; 4];
        for (c, row) in out.iter_mut().enumerate() {
            let base = self.idx(c, e, 0);
            row[..nl].copy_from_slice(&coeffs[base..base + nl]);
        }
        out
    }

    /// Jet from local coefficients and a basis table row, filling only `derivs`.
    #[inline]
    pub fn jet(&self, local: &[[f64; MAX_LOCAL]; 4], row: &[f64], derivs: &[usize]) -> PointJet {
        let nl = self.n_local();
        let mut j = PointJet::ZERO;
        for &d in derivs {
            let mut v = [0.0; 4];
            for l in 0..nl {
                let b = row[l * N_DERIV + d];
                if b != 0.0 {
                    for c in 0..4 {
                        v[c] += local[c][l] * b;
                    }
                }
            }
            j.d[d] = StateVec4(v);
        }
        j
    }

    /// Physical coordinates of volume node p of element e.
    pub fn vol_point(&self, e: usize, p: usize) -> (f64, f64) {
        let (xc, yc) = self.mesh.center(e);
        (xc + self.vol[p].sx, yc + self.vol[p].sy)
    }
}

#[derive(Debug, Clone)]
pub struct DofField {
    pub space: Arc<DgSpace>,
    pub coeffs: Vec<f64>,
    pub time: f64,
}

impl DofField {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        DofField { space: space.clone(), coeffs: vec![0.0; space.n_dofs()], time: 0.0 }
    }

    pub fn get(&self, c: usize, e: usize, l: usize) -> f64 {
        self.coeffs[self.space.idx(c, e, l)]
    }

    pub fn set(&mut self, c: usize, e: usize, l: usize, v: f64) {
        let i = self.space.idx(c, e, l);
        self.coeffs[i] = v;
    }

    /// L² projection of f onto the space, integrals by the element quadrature.
    pub fn project<F>(space: &Arc<DgSpace>, f: F) -> Self
    where
        F: Fn(f64, f64) -> StateVec4 + Sync,
    {
        let nl = space.n_local();
        let ne = space.mesh.n_elem();
        let local: Vec<[[f64; MAX_LOCAL]; 4]> = (0..ne)
            .into_par_iter()
            .map(|e| {
                let mut acc = [[0.0; MAX_LOCAL]; 4];
                for p in 0..space.vol.len() {
                    let (x, y) = space.vol_point(e, p);
                    let u = f(x, y);
                    let row = space.vol_row(p);
                    let w = space.vol[p].w;
                    for l in 0..nl {
                        let b = w * row[l * N_DERIV];
                        for c in 0..4 {
                            acc[c][l] += b * u.0[c];
                        }
                    }
                }
                for row in acc.iter_mut() {
                    for l in 0..nl {
                        row[l] /= space.mass[l];
                    }
                }
                acc
            })
            .collect();
        let mut field = DofField::zeros(space);
        for (e, acc) in local.iter().enumerate() {
            for c in 0..4 {
                for l in 0..nl {
                    field.set(c, e, l, acc[c][l]);
                }
            }
        }
        field
    }

    /// Σ_l u^(l) ∂^d v^(l) at offsets from the center of element e.
    pub fn evaluate_in(&self, e: usize, sx: f64, sy: f64, deriv: (usize, usize)) -> StateVec4 {
        let s = &self.space;
        let (dx, dy) = (s.mesh.dx(), s.mesh.dy());
        let mut v = StateVec4::ZERO;
        for l in 0..s.n_local() {
            let b = s.basis.eval(l, deriv, sx, sy, dx, dy);
            for c in 0..4 {
                v.0[c] += self.get(c, e, l) * b;
            }
        }
        v
    }

    /// Value at a physical point, using the element that contains it.
    pub fn evaluate(&self, x: f64, y: f64) -> StateVec4 {
        let e = self.space.mesh.locate(x, y);
        let (xc, yc) = self.space.mesh.center(e);
        self.evaluate_in(e, x - xc, y - yc, (0, 0))
    }

    /// Jets at every volume node of element e.
    pub fn vol_jets(&self, e: usize, derivs: &[usize]) -> Vec<PointJet> {
        let s = &self.space;
        let local = s.gather(&self.coeffs, e);
        (0..s.vol.len()).map(|p| s.jet(&local, s.vol_row(p), derivs)).collect()
    }

    /// Traces on the x-face with index (i, j), i ∈ 0..=nx, as (interior-from-left, from-right).
    /// Outside the domain the trace and all its derivatives are zero.
    pub fn xface_traces(&self, i: usize, j: usize, derivs: &[usize]) -> Vec<(PointJet, PointJet)> {
        let s = &self.space;
        let nx = s.mesh.x.n;
        let left = if i > 0 { Some(s.gather(&self.coeffs, s.mesh.elem(i - 1, j))) } else { None };
        let right = if i < nx { Some(s.gather(&self.coeffs, s.mesh.elem(i, j))) } else { None };
        (0..s.xface.len())
            .map(|k| {
                let a = left.as_ref().map_or(PointJet::ZERO, |c| s.jet(c, s.xface_row(k, true), derivs));
                let b = right.as_ref().map_or(PointJet::ZERO, |c| s.jet(c, s.xface_row(k, false), derivs));
                (a, b)
            })
            .collect()
    }

    /// Traces on the y-face with index (i, j), j ∈ 0..=ny, as (from-below, from-above).
    pub fn yface_traces(&self, i: usize, j: usize, derivs: &[usize]) -> Vec<(PointJet, PointJet)> {
        let s = &self.space;
        let ny = s.mesh.y.n;
        let below = if j > 0 { Some(s.gather(&self.coeffs, s.mesh.elem(i, j - 1))) } else { None };
        let above = if j < ny { Some(s.gather(&self.coeffs, s.mesh.elem(i, j))) } else { None };
        (0..s.yface.len())
            .map(|k| {
                let a = below.as_ref().map_or(PointJet::ZERO, |c| s.jet(c, s.yface_row(k, true), derivs));
                let b = above.as_ref().map_or(PointJet::ZERO, |c| s.jet(c, s.yface_row(k, false), derivs));
                (a, b)
            })
            .collect()
    }

    /// Quadrature approximation of ∫_K f over element e; f receives (x, y, value jet).
    pub fn integrate_element<F>(&self, e: usize, derivs: &[usize], f: F) -> f64
    where
        F: Fn(f64, f64, &PointJet) -> f64,
    {
        let jets = self.vol_jets(e, derivs);
        let mut s = 0.0;
        for (p, j) in jets.iter().enumerate() {
            let (x, y) = self.space.vol_point(e, p);
            s += self.space.vol[p].w * f(x, y, j);
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    /// y = self + a·x, coefficientwise.
    pub fn axpy(&self, a: f64, x: &DofField) -> DofField {
        let coeffs = self.coeffs.iter().zip(&x.coeffs).map(|(u, v)| u + a * v).collect();
        DofField { space: self.space.clone(), coeffs, time: self.time }
    }

    /// Columnar snapshot: one row per volume quadrature node.
    pub fn write_snapshot<W: Write>(&self, w: &mut W) -> Result<()> {
        let s = &self.space;
        let two_d = s.dim() == 2;
        writeln!(w, "# t = {:.10e}", self.time)?;
        if two_d {
            writeln!(w, "x y u1 u2 u3 u4 rho_q")?;
        } else {
            writeln!(w, "x u1 u2 u3 u4 rho_q")?;
        }
        for e in 0..s.mesh.n_elem() {
            let jets = self.vol_jets(e, &[0]);
            for (p, j) in jets.iter().enumerate() {
                let (x, y) = s.vol_point(e, p);
                let u = j.value();
                if two_d {
                    write!(w, "{x:.10e} {y:.10e}")?;
                } else {
                    write!(w, "{x:.10e}")?;
                }
                writeln!(
                    w,
                    " {:.10e} {:.10e} {:.10e} {:.10e} {:.10e}",
                    u[0],
                    u[1],
                    u[2],
                    u[3],
                    u.norm_sq()
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{DX, DXX, DXXX};
    use rand::{Rng, SeedableRng};

    fn space_1d(q: usize, j: usize) -> Arc<DgSpace> {
        DgSpace::new(CartesianMesh::new_1d(-1.0, 1.0, j).unwrap(), q).unwrap()
    }

    fn space_2d(q: usize) -> Arc<DgSpace> {
        DgSpace::new(CartesianMesh::new_2d((-1.0, 1.0), (0.0, 1.5), 4, 3).unwrap(), q).unwrap()
    }

    #[test]
    fn project_constant() {
        let s = space_2d(3);
        let c = StateVec4::new(1.5, -2.0, 0.25, 3.0);
        let f = DofField::project(&s, |_, _| c);
        for e in 0..s.mesh.n_elem() {
            for comp in 0..4 {
                assert!((f.get(comp, e, 0) - c[comp]).abs() < 1e-14);
                for l in 1..s.n_local() {
                    assert!(f.get(comp, e, l).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn project_linear_function_on_one_cell() {
        let s = DgSpace::new(CartesianMesh::new_1d(2.0, 3.0, 1).unwrap(), 2).unwrap();
        let f = DofField::project(&s, |x, _| StateVec4::new(x, 0.0, 0.0, 0.0));
        assert!((f.get(0, 0, 0) - 2.5).abs() < 1e-14);
        assert!((f.get(0, 0, 1) - 1.0).abs() < 1e-13);
        assert!(f.get(0, 0, 2).abs() < 1e-13);
    }

    #[test]
    fn project_reproduces_polynomials() {
        for q in 1..=3 {
            let s = space_2d(q);
            let poly = |x: f64, y: f64| {
                let mut v = 0.3 + x - 0.5 * y;
                if q >= 2 {
                    v += x * y - 0.7 * y * y;
                }
                if q >= 3 {
                    v += x * x * x - 2.0 * x * y * y;
                }
                StateVec4::new(v, 2.0 * v, -v, 0.5)
            };
            let f = DofField::project(&s, poly);
            for &(x, y) in &[(0.13, 0.41), (-0.77, 1.2), (0.9, 0.05)] {
                let d = (f.evaluate(x, y) - poly(x, y)).max_abs();
                assert!(d < 1e-12, "q={q} d={d}");
            }
        }
    }

    #[test]
    fn project_basis_function_gives_unit_coefficient() {
        let s = space_1d(3, 1);
        let f = DofField::project(&s, |x, _| StateVec4::new(x * x - 4.0 / 12.0, 0.0, 0.0, 0.0));
        assert!((f.get(0, 0, 2) - 1.0).abs() < 1e-13);
        for l in [0, 1, 3] {
            assert!(f.get(0, 0, l).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_left_inverts_evaluation() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for q in 1..=3 {
            let s = space_2d(q);
            let mut f = DofField::zeros(&s);
            for v in f.coeffs.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let g = DofField::project(&s, |x, y| {
                let e = s.mesh.locate(x, y);
                let (xc, yc) = s.mesh.center(e);
                f.evaluate_in(e, x - xc, y - yc, (0, 0))
            });
            let d = f.coeffs.iter().zip(&g.coeffs).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
            assert!(d < 1e-12, "q={q} d={d}");
        }
    }

    #[test]
    fn traces_of_p2_field() {
        let s = space_1d(2, 4);
        let dx = s.mesh.dx();
        let mut f = DofField::zeros(&s);
        let (a, b, c) = (0.7, -1.3, 2.1);
        f.set(0, 1, 0, a);
        f.set(0, 1, 1, b);
        f.set(0, 1, 2, c);
        let derivs = [0, DX, DXX, DXXX];
        // face 2 sits on the right of element 1
        let tr = f.xface_traces(2, 0, &derivs);
        let right_trace = tr[0].0;
        assert!((right_trace.d[0][0] - (a + 0.5 * dx * b + dx * dx / 6.0 * c)).abs() < 1e-14);
        let direct = f.evaluate_in(1, 0.5 * dx, 0.0, (0, 0));
        assert!((right_trace.d[0][0] - direct[0]).abs() < 1e-15);
        assert!((right_trace.d[DXX][0] - 2.0 * c).abs() < 1e-14);
        assert_eq!(right_trace.d[DXXX][0], 0.0);
        let tr1 = f.xface_traces(1, 0, &derivs);
        assert!((tr1[0].1.d[DXX][0] - 2.0 * c).abs() < 1e-14);
    }

    #[test]
    fn boundary_traces_are_zero_outside() {
        let s = space_2d(2);
        let f = DofField::project(&s, |_, _| StateVec4::new(1.0, 1.0, 1.0, 1.0));
        let tr = f.xface_traces(0, 1, &[0, 1, 2]);
        for (a, b) in tr {
            assert_eq!(a, PointJet::ZERO);
            assert!((b.d[0] - StateVec4::new(1.0, 1.0, 1.0, 1.0)).max_abs() < 1e-14);
        }
        let trb = f.yface_traces(2, s.mesh.y.n, &[0]);
        for (a, b) in trb {
            assert!((a.d[0][2] - 1.0).abs() < 1e-14);
            assert_eq!(b, PointJet::ZERO);
        }
    }

    #[test]
    fn smooth_fields_have_continuous_traces() {
        let s = space_2d(2);
        let f = DofField::project(&s, |x, y| StateVec4::new(x * y, x * x, 1.0 - y, y * y));
        for (a, b) in f.xface_traces(2, 1, &[0]) {
            assert!((a.d[0] - b.d[0]).max_abs() < 1e-13);
        }
        for (a, b) in f.yface_traces(1, 2, &[0]) {
            assert!((a.d[0] - b.d[0]).max_abs() < 1e-13);
        }
    }

    #[test]
    fn element_integrals() {
        let s = space_1d(1, 1);
        let f = DofField::zeros(&s);
        // 2-point rule on [−1, 1]
        let v = f.integrate_element(0, &[0], |x, _, _| x * x);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let odd = f.integrate_element(0, &[0], |x, _, _| x.powi(3));
        assert!(odd.abs() < 1e-15);
        let s3 = space_1d(3, 2);
        let mut g = DofField::zeros(&s3);
        g.set(0, 0, 1, 1.0);
        let a1 = g.integrate_element(0, &[0], |_, _, j| j.d[0][0] * j.d[0][0]);
        assert!((a1 - s3.mass[1]).abs() < 1e-15);
        assert!((s3.mass[1] - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_jets_match_finite_differences() {
        let s = space_2d(3);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut f = DofField::zeros(&s);
        for v in f.coeffs.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let e = 5;
        let jets = f.vol_jets(e, &(0..N_DERIV).collect::<Vec<_>>());
        let h = 1e-3;
        for (p, j) in jets.iter().enumerate() {
            let (sx, sy) = (s.vol[p].sx, s.vol[p].sy);
            let ev = |a: f64, b: f64| f.evaluate_in(e, sx + a, sy + b, (0, 0));
            let fx = (ev(h, 0.0) - ev(-h, 0.0)) * (0.5 / h);
            let fxy = (ev(h, h) - ev(h, -h) - ev(-h, h) + ev(-h, -h)) * (0.25 / (h * h));
            let fyyy = (ev(0.0, 2.0 * h) - ev(0.0, h) * 2.0 + ev(0.0, -h) * 2.0 - ev(0.0, -2.0 * h)) * (0.5 / (h * h * h));
            assert!((j.d[1] - fx).max_abs() < 1e-5);
            assert!((j.d[4] - fxy).max_abs() < 1e-5);
            assert!((j.d[9] - fyyy).max_abs() < 1e-4);
        }
    }

    #[test]
    fn snapshot_has_one_row_per_node() {
        let s = space_1d(2, 3);
        let f = DofField::project(&s, |x, _| StateVec4::new(x, 0.0, 0.0, 0.0));
        let mut buf = Vec::new();
        f.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 + 9);
        assert_eq!(lines[1], "x u1 u2 u3 u4 rho_q");
    }
}
