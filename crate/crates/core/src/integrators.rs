//! Explicit one-step time integrators and CFL step control.

use crate::error::{DgError, Result};
use crate::field::DofField;

/// A time-stamped vector that the integrators can form linear combinations of.
pub trait State: Clone {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    /// Σ c_i x_i; the result carries the time of the first term.
    fn combine(terms: &[(f64, &Self)]) -> Self;
}

impl State for DofField {
    fn time(&self) -> f64 {
        self.time
    }

    fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    fn combine(terms: &[(f64, &Self)]) -> Self {
        let first = terms[0].1;
        let mut coeffs = vec![0.0; first.coeffs.len()];
        for (c, f) in terms {
            for (o, v) in coeffs.iter_mut().zip(&f.coeffs) {
                *o += c * v;
            }
        }
        DofField { space: first.space.clone(), coeffs, time: first.time }
    }
}

/// Plain vector state for ODE tests and small systems.
#[derive(Debug, Clone, PartialEq)]
pub struct VecState {
    pub t: f64,
    pub y: Vec<f64>,
}

impl State for VecState {
    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut y = vec![0.0; terms[0].1.y.len()];
        for (c, s) in terms {
            for (o, v) in y.iter_mut().zip(&s.y) {
                *o += c * v;
            }
        }
        VecState { t: terms[0].1.t, y }
    }
}

fn at<S: State>(mut s: S, t: f64) -> S {
    s.set_time(t);
    s
}

/// Classical fourth-order RK in the form
/// φ1 = Φ + τ/2 L(Φ), φ2 = Φ + τ/2 L(φ1), φ3 = Φ + τ L(φ2),
/// Φ(t+τ) = ⅓(φ1 + 2φ2 + φ3 − Φ + τ/2 L(φ3)).
pub fn rk4_step<S, L>(phi: &S, tau: f64, mut op: L) -> Result<S>
where
    S: State,
    L: FnMut(&S) -> Result<S>,
{
    let t = phi.time();
    let k1 = op(phi)?;
    let p1 = at(S::combine(&[(1.0, phi), (0.5 * tau, &k1)]), t + 0.5 * tau);
    let k2 = op(&p1)?;
    let p2 = at(S::combine(&[(1.0, phi), (0.5 * tau, &k2)]), t + 0.5 * tau);
    let k3 = op(&p2)?;
    let p3 = at(S::combine(&[(1.0, phi), (tau, &k3)]), t + tau);
    let k4 = op(&p3)?;
    // ⅓(φ1 + 2φ2 + φ3 − Φ + τ/2 k4) expanded as an increment, so L = 0 is bit-exact
    let out = S::combine(&[
        (1.0, phi),
        (tau / 6.0, &k1),
        (tau / 3.0, &k2),
        (tau / 3.0, &k3),
        (tau / 6.0, &k4),
    ]);
    Ok(at(out, t + tau))
}

/// Three-stage TVD RK of Shu and Osher.
pub fn tvdrk3_step<S, L>(phi: &S, tau: f64, mut op: L) -> Result<S>
where
    S: State,
    L: FnMut(&S) -> Result<S>,
{
    let t = phi.time();
    let k1 = op(phi)?;
    let p1 = at(S::combine(&[(1.0, phi), (tau, &k1)]), t + tau);
    let k2 = op(&p1)?;
    // ¾Φ + ¼φ1 + ¼τk2 = Φ + ¼τ(k1 + k2), and ⅓Φ + ⅔φ2 + ⅔τk3 = Φ + τ/6 (k1 + k2 + 4k3)
    let p2 = at(S::combine(&[(1.0, phi), (0.25 * tau, &k1), (0.25 * tau, &k2)]), t + 0.5 * tau);
    let k3 = op(&p2)?;
    let out = S::combine(&[(1.0, phi), (tau / 6.0, &k1), (tau / 6.0, &k2), (2.0 * tau / 3.0, &k3)]);
    Ok(at(out, t + tau))
}

/// Rates for the two-stage method: stage one needs 𝓝 and 𝓝ₜ at u, stage two
/// only 𝓝ₜ at the intermediate state.
pub trait TwoStageRates<S> {
    fn first(&mut self, u: &S) -> Result<(S, S)>;
    fn second(&mut self, u_star: &S) -> Result<S>;
}

/// Closure pair adapter for [`TwoStageRates`].
pub struct RatePair<F, G> {
    pub n_and_nt: F,
    pub nt: G,
}

impl<S, F, G> TwoStageRates<S> for RatePair<F, G>
where
    F: FnMut(&S) -> Result<(S, S)>,
    G: FnMut(&S) -> Result<S>,
{
    fn first(&mut self, u: &S) -> Result<(S, S)> {
        (self.n_and_nt)(u)
    }

    fn second(&mut self, u_star: &S) -> Result<S> {
        (self.nt)(u_star)
    }
}

/// Returns u* only (first stage), used by tests and the DG scheme.
pub fn ts_intermediate<S: State>(u: &S, n: &S, nt: &S, tau: f64, theta: f64) -> Result<S> {
    if theta == 1.0 {
        return Err(DgError::Config("theta must differ from 1".into()));
    }
    let a = 3.0 * (1.0 - theta);
    let star = S::combine(&[(1.0, u), (tau / a, n), (tau * tau / (4.0 * a), nt)]);
    Ok(at(star, u.time() + tau / a))
}

/// Two-stage fourth-order update
/// u* = u + τ/(3(1−ϑ)) 𝓝 + τ²/(12(1−ϑ)) 𝓝ₜ,
/// u(t+τ) = u + τ𝓝 + ϑτ²/2 𝓝ₜ(u) + (1−ϑ)τ²/2 𝓝ₜ(u*).
pub fn ts_fourth_step<S, R>(u: &S, tau: f64, theta: f64, rates: &mut R) -> Result<S>
where
    S: State,
    R: TwoStageRates<S>,
{
    if theta == 1.0 {
        return Err(DgError::Config("theta must differ from 1".into()));
    }
    let (n, nt) = rates.first(u)?;
    let star = ts_intermediate(u, &n, &nt, tau, theta)?;
    let nt_star = rates.second(&star)?;
    let t3 = 0.5 * theta * tau * tau;
    let t4 = 0.5 * tau * tau - t3;
    let out = S::combine(&[(1.0, u), (tau, &n), (t3, &nt), (t4, &nt_star)]);
    Ok(at(out, u.time() + tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub mu: f64,
    pub q: usize,
    pub dim: usize,
    /// Smallest mesh spacing.
    pub h: f64,
    pub final_time: f64,
    pub clip_last: bool,
}

impl StepControl {
    /// τ = μΔx/(2q+1) in 1D, μ·min(h)/(2(2q+1)) in 2D.
    pub fn tau(&self) -> f64 {
        let d = (2 * self.q + 1) as f64;
        if self.dim == 1 {
            self.mu * self.h / d
        } else {
            self.mu * self.h / (2.0 * d)
        }
    }

    pub fn n_steps(&self) -> usize {
        if self.final_time <= 0.0 {
            return 0;
        }
        let r = self.final_time / self.tau();
        let n = r.round();
        if (r - n).abs() <= 1e-10 * r.max(1.0) {
            n as usize
        } else {
            r.ceil() as usize
        }
    }

    /// Step size to take from `time`, clipped so the last step lands on T.
    pub fn next_tau(&self, time: f64) -> f64 {
        let tau = self.tau();
        if self.clip_last && time + tau > self.final_time - 1e-12 * self.final_time.abs().max(1.0) {
            (self.final_time - time).max(0.0).min(tau)
        } else {
            tau
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !(self.h > 0.0) || self.final_time < 0.0 {
            return Err(DgError::Config(format!(
                "invalid step control: mu = {}, h = {}, T = {}",
                self.mu, self.h, self.final_time
            )));
        }
        Ok(())
    }
}
