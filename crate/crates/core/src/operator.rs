//! Edge + volume assembly of DG weak forms, shared by all three schemes.
//!
//! A [`PointKernel`] turns a pointwise jet into one or more (flux, source)
//! triples. A sweep evaluates the Lax-Friedrichs flux on every face, then
//! assembles per element and local index
//!
//!   rate^(l) = (1/a^(l)) [ ∫_K (Fx ∂x v + Fy ∂y v + G v) − Σ_e ∫_e ĥ v ].

use rayon::prelude::*;

use crate::basis::{DX, DY};
use crate::cascade::{Forcing, SourceBundle};
use crate::error::Result;
use crate::field::{DofField, PointJet, MAX_LOCAL, N_DERIV};
use crate::physics::{alpha, beta, g_of_rho, gamma, rho_of_u, PhysParams, StateVec4};

pub const MAX_OUT: usize = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointFlux {
    pub fx: StateVec4,
    pub fy: StateVec4,
    pub g: StateVec4,
}

pub trait PointKernel: Sync {
    /// Number of independent functionals produced by one sweep.
    fn outputs(&self) -> usize;
    /// Highest spatial derivative order read from the jet.
    fn order(&self) -> usize;
    fn eval(&self, jet: &PointJet, x: f64, y: f64, out: &mut [PointFlux; MAX_OUT]) -> Result<()>;
}

/// ½[F⁻·n + F⁺·n − (u⁺ − u⁻)] given the normal fluxes on both sides.
#[inline]
pub fn lf_combine(fn_minus: StateVec4, fn_plus: StateVec4, u_minus: StateVec4, u_plus: StateVec4) -> StateVec4 {
    (fn_minus + fn_plus - (u_plus - u_minus)) * 0.5
}

/// Lax-Friedrichs flux for a continuous flux function F(u) = (Fx, Fy) and normal n.
pub fn lf_flux<F>(u_minus: StateVec4, u_plus: StateVec4, normal: (f64, f64), flux: F) -> StateVec4
where
    F: Fn(&StateVec4) -> (StateVec4, StateVec4),
{
    let (ax, ay) = flux(&u_minus);
    let (bx, by) = flux(&u_plus);
    let fm = ax * normal.0 + ay * normal.1;
    let fp = bx * normal.0 + by * normal.1;
    lf_combine(fm, fp, u_minus, u_plus)
}

/// Semi-discrete kernel: F = f(u), G = 𝓜(u) + R.
pub struct RkKernel<'a> {
    pub params: PhysParams,
    pub time: f64,
    pub forcing: Option<&'a dyn Forcing>,
}

impl PointKernel for RkKernel<'_> {
    fn outputs(&self) -> usize {
        1
    }

    fn order(&self) -> usize {
        0
    }

    fn eval(&self, jet: &PointJet, x: f64, y: f64, out: &mut [PointFlux; MAX_OUT]) -> Result<()> {
        let u = jet.d[0];
        let g = g_of_rho(rho_of_u(&u), &self.params)?;
        let mut src = gamma(&u) * g;
        if let Some(f) = self.forcing {
            src += f.bundle(self.time, x, y, 0).r;
        }
        out[0] = PointFlux { fx: alpha(&u), fy: beta(&u), g: src };
        Ok(())
    }
}

pub fn source_at(forcing: Option<&dyn Forcing>, t: f64, x: f64, y: f64, order: usize) -> Option<SourceBundle> {
    forcing.map(|f| f.bundle(t, x, y, order))
}

/// One edge pass and one element pass. Returns one rate array per kernel output,
/// laid out like `DofField::coeffs`.
pub fn sweep<K: PointKernel>(u: &DofField, kernel: &K) -> Result<Vec<Vec<f64>>> {
    let s = &*u.space;
    s.record_sweep();
    let nout = kernel.outputs();
    let derivs = s.basis.active_derivs(kernel.order());
    let mesh = s.mesh;
    let (nx, ny) = (mesh.x.n, mesh.y.n);
    let (dx, dy) = (mesh.dx(), mesh.dy());
    let two_d = mesh.dim == 2;
    let ycenter = |j: usize| if two_d { mesh.y.center(j) } else { 0.0 };

    let nxn = s.xface.len();
    let mut xflux = vec![StateVec4::ZERO; (nx + 1) * ny * nxn * MAX_OUT];
    xflux.par_chunks_mut(nxn * MAX_OUT).enumerate().try_for_each(|(f, chunk)| -> Result<()> {
        let (i, j) = (f % (nx + 1), f / (nx + 1));
        let xf = mesh.x.a + i as f64 * dx;
        let yc = ycenter(j);
        let mut om = [PointFlux::default(); MAX_OUT];
        let mut op = [PointFlux::default(); MAX_OUT];
        for (k, (jm, jp)) in u.xface_traces(i, j, &derivs).iter().enumerate() {
            let y = yc + s.xface[k].s;
            kernel.eval(jm, xf, y, &mut om)?;
            kernel.eval(jp, xf, y, &mut op)?;
            for o in 0..nout {
                chunk[k * MAX_OUT + o] = lf_combine(om[o].fx, op[o].fx, jm.d[0], jp.d[0]);
            }
        }
        Ok(())
    })?;

    let nyn = s.yface.len();
    let mut yflux = vec![StateVec4::ZERO; if two_d { nx * (ny + 1) * nyn * MAX_OUT } else { 0 }];
    if two_d {
        yflux.par_chunks_mut(nyn * MAX_OUT).enumerate().try_for_each(|(f, chunk)| -> Result<()> {
            let (i, j) = (f % nx, f / nx);
            let yf = mesh.y.a + j as f64 * dy;
            let xc = mesh.x.center(i);
            let mut om = [PointFlux::default(); MAX_OUT];
            let mut op = [PointFlux::default(); MAX_OUT];
            for (k, (jm, jp)) in u.yface_traces(i, j, &derivs).iter().enumerate() {
                let x = xc + s.yface[k].s;
                kernel.eval(jm, x, yf, &mut om)?;
                kernel.eval(jp, x, yf, &mut op)?;
                for o in 0..nout {
                    chunk[k * MAX_OUT + o] = lf_combine(om[o].fy, op[o].fy, jm.d[0], jp.d[0]);
                }
            }
            Ok(())
        })?;
    }

    let nl = s.n_local();
    let block = nout * 4 * nl;
    let mut local = vec![0.0; mesh.n_elem() * block];
    local.par_chunks_mut(block).enumerate().try_for_each(|(e, out)| -> Result<()> {
        let coeffs = s.gather(&u.coeffs, e);
        let (i, j) = mesh.elem_ij(e);
        let (xc, yc) = mesh.center(e);
        let mut acc = [[[0.0; MAX_LOCAL]; 4]; MAX_OUT];
        let mut fl = [PointFlux::default(); MAX_OUT];
        for (p, node) in s.vol.iter().enumerate() {
            let row = s.vol_row(p);
            let jet = s.jet(&coeffs, row, &derivs);
            kernel.eval(&jet, xc + node.sx, yc + node.sy, &mut fl)?;
            for l in 0..nl {
                let v0 = node.w * row[l * N_DERIV];
                let vx = node.w * row[l * N_DERIV + DX];
                let vy = node.w * row[l * N_DERIV + DY];
                for o in 0..nout {
                    for c in 0..4 {
                        acc[o][c][l] += fl[o].fx.0[c] * vx + fl[o].fy.0[c] * vy + fl[o].g.0[c] * v0;
                    }
                }
            }
        }
        let mut face = |flux: &[StateVec4], on_y: bool, hi: bool, sign: f64| {
            let nodes = if on_y { &s.yface } else { &s.xface };
            for (k, node) in nodes.iter().enumerate() {
                let row = if on_y { s.yface_row(k, hi) } else { s.xface_row(k, hi) };
                for l in 0..nl {
                    let v = sign * node.w * row[l * N_DERIV];
                    for o in 0..nout {
                        let h = flux[k * MAX_OUT + o];
                        for c in 0..4 {
                            acc[o][c][l] -= h.0[c] * v;
                        }
                    }
                }
            }
        };
        let stride = nxn * MAX_OUT;
        let right = (j * (nx + 1) + i + 1) * stride;
        let left = (j * (nx + 1) + i) * stride;
        face(&xflux[right..right + stride], false, true, 1.0);
        face(&xflux[left..left + stride], false, false, -1.0);
        if two_d {
            let stride = nyn * MAX_OUT;
            let top = ((j + 1) * nx + i) * stride;
            let bottom = (j * nx + i) * stride;
            face(&yflux[top..top + stride], true, true, 1.0);
            face(&yflux[bottom..bottom + stride], true, false, -1.0);
        }
        for o in 0..nout {
            for c in 0..4 {
                for l in 0..nl {
                    out[(o * 4 + c) * nl + l] = acc[o][c][l] / s.mass[l];
                }
            }
        }
        Ok(())
    })?;

    let mut rates = vec![vec![0.0; s.n_dofs()]; nout];
    for e in 0..mesh.n_elem() {
        let blk = &local[e * block..(e + 1) * block];
        for (o, rate) in rates.iter_mut().enumerate() {
            for c in 0..4 {
                let base = s.idx(c, e, 0);
                rate[base..base + nl].copy_from_slice(&blk[(o * 4 + c) * nl..(o * 4 + c + 1) * nl]);
            }
        }
    }
    Ok(rates)
}

/// Semi-discrete rate L(u_h) at time `field.time`.
pub fn residual_l(field: &DofField, p: &PhysParams, forcing: Option<&dyn Forcing>) -> Result<DofField> {
    let k = RkKernel { params: *p, time: field.time, forcing };
    let mut r = sweep(field, &k)?;
    Ok(DofField { space: field.space.clone(), coeffs: r.remove(0), time: field.time })
}

/// 2 Σ_K ∫_K u_h · L(u_h), i.e. the time derivative of the discrete charge.
pub fn dqdt_semidiscrete(field: &DofField, p: &PhysParams) -> Result<f64> {
    let r = residual_l(field, p, None)?;
    Ok(2.0 * weighted_inner(field, &r))
}

/// Σ_K ∫_K u·v for two fields on the same space, using mass orthogonality.
pub fn weighted_inner(a: &DofField, b: &DofField) -> f64 {
    let s = &a.space;
    let nl = s.n_local();
    let mut sum = 0.0;
    for (i, (x, y)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
        sum += s.mass[i % nl] * x * y;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DgSpace;
    use crate::mesh::CartesianMesh;
    use crate::physics::{flux_f, source_m};
    use crate::quadrature::QuadRule;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn random_state(rng: &mut impl Rng) -> StateVec4 {
        StateVec4([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
    }

    #[test]
    fn flux_examples() {
        let h = lf_flux(StateVec4::unit(0), StateVec4::ZERO, (1.0, 0.0), flux_f);
        assert_eq!(h, StateVec4::new(0.5, 0.5, 0.0, 0.0));
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let u = random_state(&mut rng);
            let v = random_state(&mut rng);
            for n in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                let c = lf_flux(u, u, n, flux_f);
                let (fx, fy) = flux_f(&u);
                assert!((c - (fx * n.0 + fy * n.1)).max_abs() < 1e-14);
                let a = lf_flux(u, v, n, flux_f);
                let b = lf_flux(v, u, (-n.0, -n.1), flux_f);
                assert_eq!(a, -b);
            }
        }
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let s = DgSpace::new(CartesianMesh::new_2d((-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap(), 2).unwrap();
        let r = residual_l(&DofField::zeros(&s), &PhysParams::default(), None).unwrap();
        assert!(r.coeffs.iter().all(|&v| v == 0.0));
    }

    // Weak-form residual of a single element assembled directly with a dense rule.
    fn dense_single_cell(field: &DofField, p: &PhysParams) -> Vec<[f64; 4]> {
        let s = &field.space;
        let (dx, dy) = (s.mesh.dx(), s.mesh.dy());
        let r = QuadRule::gauss_legendre(5).unwrap();
        let nl = s.n_local();
        let mut out = vec![[0.0; 4]; nl];
        let ev = |sx: f64, sy: f64| field.evaluate_in(0, sx, sy, (0, 0));
        for l in 0..nl {
            let v = |sx: f64, sy: f64, d: (usize, usize)| s.basis.eval(l, d, sx, sy, dx, dy);
            let mut acc = StateVec4::ZERO;
            for (&a, &wa) in r.nodes.iter().zip(&r.weights) {
                for (&b, &wb) in r.nodes.iter().zip(&r.weights) {
                    let (sx, sy) = (0.5 * dx * a, 0.5 * dy * b);
                    let u = ev(sx, sy);
                    let (fx, fy) = flux_f(&u);
                    let m = source_m(&u, p).unwrap();
                    let w = 0.25 * dx * dy * wa * wb;
                    acc += (fx * v(sx, sy, (1, 0)) + fy * v(sx, sy, (0, 1)) + m * v(sx, sy, (0, 0))) * w;
                }
                // four edges, exterior state zero
                let se = 0.5 * dy * a;
                let we = 0.5 * dy * wa;
                acc -= lf_flux(ev(0.5 * dx, se), StateVec4::ZERO, (1.0, 0.0), flux_f) * (we * v(0.5 * dx, se, (0, 0)));
                acc -= lf_flux(ev(-0.5 * dx, se), StateVec4::ZERO, (-1.0, 0.0), flux_f) * (we * v(-0.5 * dx, se, (0, 0)));
                let se = 0.5 * dx * a;
                let we = 0.5 * dx * wa;
                acc -= lf_flux(ev(se, 0.5 * dy), StateVec4::ZERO, (0.0, 1.0), flux_f) * (we * v(se, 0.5 * dy, (0, 0)));
                acc -= lf_flux(ev(se, -0.5 * dy), StateVec4::ZERO, (0.0, -1.0), flux_f) * (we * v(se, -0.5 * dy, (0, 0)));
            }
            for c in 0..4 {
                out[l][c] = acc[c] / s.mass[l];
            }
        }
        out
    }

    #[test]
    fn single_cell_matches_dense_assembly_for_linear_problem() {
        let p = PhysParams { m: 0.7, lambda: 0.0, kappa: 1.0 };
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for q in 1..=3 {
            let s = DgSpace::new(CartesianMesh::new_2d((0.0, 0.5), (0.0, 0.3), 1, 1).unwrap(), q).unwrap();
            let mut f = DofField::zeros(&s);
            for v in f.coeffs.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let r = residual_l(&f, &p, None).unwrap();
            let d = dense_single_cell(&f, &p);
            for l in 0..s.n_local() {
                for c in 0..4 {
                    let a = r.get(c, 0, l);
                    assert!((a - d[l][c]).abs() < 1e-10 * (1.0 + a.abs()), "q={q} l={l} c={c}: {a} vs {}", d[l][c]);
                }
            }
        }
    }

    #[test]
    fn constant_cell_residual() {
        let p = PhysParams::default();
        let s = DgSpace::new(CartesianMesh::new_1d(0.0, 1.0, 1).unwrap(), 2).unwrap();
        let c = StateVec4::new(0.3, 0.1, -0.2, 0.4);
        let f = DofField::project(&s, |_, _| c);
        let r = residual_l(&f, &p, None).unwrap();
        // both endpoints see zero exterior data: ĥ(+1) + ĥ(−1) = c, so rate^(0) = −c + 𝓜(c)
        let expect = -c + source_m(&c, &p).unwrap();
        for k in 0..4 {
            assert!((r.get(k, 0, 0) - expect[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn flux_part_is_linear() {
        let p = PhysParams { m: 0.0, lambda: 0.0, kappa: 1.0 };
        let mut rng = rand::rngs::StdRng::seed_from_u64(10);
        let s = DgSpace::new(CartesianMesh::new_2d((-1.0, 1.0), (-1.0, 1.0), 4, 3).unwrap(), 3).unwrap();
        let mut a = DofField::zeros(&s);
        let mut b = DofField::zeros(&s);
        for v in a.coeffs.iter_mut().chain(b.coeffs.iter_mut()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        let sum = a.axpy(2.0, &b);
        let ra = residual_l(&a, &p, None).unwrap();
        let rb = residual_l(&b, &p, None).unwrap();
        let rs = residual_l(&sum, &p, None).unwrap();
        let lin = ra.axpy(2.0, &rb);
        let d = rs.coeffs.iter().zip(&lin.coeffs).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let scale = lin.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(d <= 1e-13 * scale, "d={d}");
    }

    #[test]
    fn charge_rate_is_non_positive() {
        let p = PhysParams::default();
        let mut rng = rand::rngs::StdRng::seed_from_u64(12);
        for dim in [1, 2] {
            for q in 1..=3 {
                let mesh = if dim == 1 {
                    CartesianMesh::new_1d(-1.0, 1.0, 7).unwrap()
                } else {
                    CartesianMesh::new_2d((-1.0, 1.0), (-1.0, 1.0), 4, 5).unwrap()
                };
                let s: Arc<DgSpace> = DgSpace::new(mesh, q).unwrap();
                let mut f = DofField::zeros(&s);
                for v in f.coeffs.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let d = dqdt_semidiscrete(&f, &p).unwrap();
                assert!(d < 0.0, "dim={dim} q={q} d={d}");
            }
        }
    }

    #[test]
    fn smooth_compact_bump_dissipates_little() {
        let p = PhysParams::default();
        let s = DgSpace::new(CartesianMesh::new_1d(-10.0, 10.0, 200).unwrap(), 3).unwrap();
        let f = DofField::project(&s, |x, _| StateVec4::new((-x * x).exp(), 0.5 * (-x * x).exp(), 0.0, 0.0));
        let d = dqdt_semidiscrete(&f, &p).unwrap();
        assert!(d <= 0.0 && d > -1e-8, "d={d}");
    }

    #[test]
    fn residual_approximates_exact_rate_for_smooth_data() {
        // u = (w, 0, 0, 0) with m = λ = 0: ∂t u = −α ∂x u = (0, −w', 0, 0)
        let p = PhysParams { m: 0.0, lambda: 0.0, kappa: 1.0 };
        let pi = std::f64::consts::PI;
        for q in 1..=3 {
            let mut errs = Vec::new();
            for &n in &[40usize, 80] {
                let s = DgSpace::new(CartesianMesh::new_1d(0.0, 1.0, n).unwrap(), q).unwrap();
                let f = DofField::project(&s, |x, _| StateVec4::new((pi * x).sin().powi(4), 0.0, 0.0, 0.0));
                let r = residual_l(&f, &p, None).unwrap();
                let exact = DofField::project(&s, |x, _| {
                    let dw = 4.0 * pi * (pi * x).sin().powi(3) * (pi * x).cos();
                    StateVec4::new(0.0, -dw, 0.0, 0.0)
                });
                let diff = r.axpy(-1.0, &exact);
                errs.push(weighted_inner(&diff, &diff).sqrt());
            }
            // the jump penalty scales like h^(q+1)/h
            let order = (errs[0] / errs[1]).log2();
            assert!(order > q as f64 - 0.3, "q={q} order={order}");
        }
    }
}
