//! Scheme selection and the time loop with diagnostics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cascade::Forcing;
use crate::cost::SchemeFamily;
use crate::diagnostics::{charge, dev_rhoq, energy, error_norms, RunReport};
use crate::error::{DgError, Result};
use crate::field::DofField;
use crate::integrators::{rk4_step, tvdrk3_step, StepControl};
use crate::lwdg::lwdg_step;
use crate::operator::residual_l;
use crate::physics::PhysParams;
use crate::tsdg::{tsdg_step, DEFAULT_THETA};
use crate::waves::FieldSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "rkdg-rk4")]
    RkdgRk4,
    #[serde(rename = "rkdg-tvdrk3")]
    RkdgTvdRk3,
    #[serde(rename = "lwdg")]
    Lwdg,
    #[serde(rename = "tsdg")]
    Tsdg,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::RkdgRk4, Scheme::RkdgTvdRk3, Scheme::Lwdg, Scheme::Tsdg];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::RkdgRk4 => "rkdg-rk4",
            Scheme::RkdgTvdRk3 => "rkdg-tvdrk3",
            Scheme::Lwdg => "lwdg",
            Scheme::Tsdg => "tsdg",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rkdg" | "rkdg-rk4" | "rk4" => Ok(Scheme::RkdgRk4),
            "rkdg-tvdrk3" | "tvdrk3" | "rk3" => Ok(Scheme::RkdgTvdRk3),
            "lwdg" => Ok(Scheme::Lwdg),
            "tsdg" => Ok(Scheme::Tsdg),
            _ => Err(DgError::Config(format!("unknown scheme '{s}'"))),
        }
    }

    pub fn family(&self) -> SchemeFamily {
        match self {
            Scheme::RkdgRk4 | Scheme::RkdgTvdRk3 => SchemeFamily::Rkdg,
            Scheme::Lwdg => SchemeFamily::Lwdg,
            Scheme::Tsdg => SchemeFamily::Tsdg,
        }
    }

    /// Operator sweeps per step.
    pub fn stages(&self) -> usize {
        match self {
            Scheme::RkdgRk4 => 4,
            Scheme::RkdgTvdRk3 => 3,
            Scheme::Lwdg => 1,
            Scheme::Tsdg => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One step of size τ.
pub fn step(scheme: Scheme, field: &DofField, tau: f64, p: &PhysParams, forcing: Option<&dyn Forcing>) -> Result<DofField> {
    let out = match scheme {
        Scheme::RkdgRk4 => rk4_step(field, tau, |u: &DofField| residual_l(u, p, forcing))?,
        Scheme::RkdgTvdRk3 => tvdrk3_step(field, tau, |u: &DofField| residual_l(u, p, forcing))?,
        Scheme::Lwdg => lwdg_step(field, tau, p, forcing)?,
        Scheme::Tsdg => tsdg_step(field, tau, DEFAULT_THETA, p, forcing)?,
    };
    if !out.is_finite() {
        return Err(DgError::Blowup { time: out.time });
    }
    Ok(out)
}

/// What to record while advancing.
#[derive(Clone, Copy, Default)]
pub struct Observer<'a> {
    /// Record every n-th step (0 records only the start, the stops and the end).
    pub every: usize,
    pub exact: Option<&'a dyn FieldSampler>,
    pub track_dev: bool,
    /// Point where |Ψ|² is sampled.
    pub probe: Option<(f64, f64)>,
    /// Times the stepper must land on exactly (snapshot times). Steps are
    /// shortened to hit them, so the step count can grow by one per stop.
    pub stops: &'a [f64],
}

fn record(report: &mut RunReport, f: &DofField, initial: &DofField, p: &PhysParams, obs: &Observer) -> Result<()> {
    report.push(f.time, charge(f), energy(f, p)?);
    if let Some(ex) = obs.exact {
        let t = f.time;
        let e = error_norms(f, |x, y| ex.sample(t, x, y));
        report.errors.get_or_insert_with(Vec::new).push(e);
    }
    if obs.track_dev {
        report.dev_rhoq.get_or_insert_with(Vec::new).push(dev_rhoq(f, initial)?);
    }
    if let Some((x, y)) = obs.probe {
        report.probe.get_or_insert_with(Vec::new).push(f.evaluate(x, y).norm_sq());
    }
    Ok(())
}

/// Advance to `control.final_time`, appending samples to `report` as it goes so
/// that a blow-up leaves the history up to the failure in place. `on_step` sees
/// the step index and the field after every step, starting with step 0.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    field: &DofField,
    scheme: Scheme,
    control: &StepControl,
    p: &PhysParams,
    forcing: Option<&dyn Forcing>,
    obs: &Observer,
    report: &mut RunReport,
    mut on_step: impl FnMut(usize, &DofField) -> Result<()>,
) -> Result<DofField> {
    control.validate()?;
    let initial = field.clone();
    let mut u = field.clone();
    let t_end = field.time + control.final_time;
    let tau0 = control.tau();
    // remainders below this are rounding, not a step
    let eps = 1e-9 * tau0;
    let n = control.n_steps();
    let mut stops: Vec<f64> = obs.stops.iter().map(|s| field.time + s).filter(|&s| s > field.time + eps && s < t_end - eps).collect();
    stops.sort_by(f64::total_cmp);
    let mut next_stop = 0;
    record(report, &u, &initial, p, obs)?;
    on_step(0, &u)?;
    let mut k = 0;
    loop {
        let done = if control.clip_last { t_end - u.time <= eps } else { k >= n };
        if done {
            break;
        }
        let mut tau = tau0;
        if control.clip_last {
            tau = tau.min(t_end - u.time);
        }
        while next_stop < stops.len() && stops[next_stop] <= u.time + eps {
            next_stop += 1;
        }
        let mut landing = None;
        if let Some(&s) = stops.get(next_stop) {
            if s - u.time <= tau {
                tau = s - u.time;
                landing = Some(s);
            }
        }
        u = step(scheme, &u, tau, p, forcing)?;
        if let Some(s) = landing {
            u.time = s;
        }
        k += 1;
        report.steps += 1;
        let last = if control.clip_last { t_end - u.time <= eps } else { k >= n };
        if last {
            u.time = if control.clip_last { t_end } else { u.time };
        }
        if last || landing.is_some() || (obs.every > 0 && k % obs.every == 0) {
            record(report, &u, &initial, p, obs)?;
        }
        on_step(k, &u)?;
    }
    Ok(u)
}
