//! The decoupled energy flow dE/dt = -Omega(E): closed-form transit times,
//! a fixed-step RK4 integrator that serves as the independent oracle for
//! them, and terminal-vs-asymptotic classification.
//!
//! For Omega(E) = beta * E^(q/p) with 0 < q < p the flow reaches E = 0 in
//! finite time; direct integration of dE / Omega(E) gives
//!
//! ```text
//! t(E0 -> 0) = p / (beta * (p - q)) * E0^((p - q) / p)
//! ```
//!
//! and for Omega(E) = alpha * E + beta * E^(q/p)
//!
//! ```text
//! t(E0 -> 0) = p / (alpha * (p - q)) * ln((alpha / beta) * E0^((p - q) / p) + 1)
//! ```
//!
//! With q >= p the integral diverges and the attractor is only reached
//! asymptotically, which is what [`classify_attractor`] reports.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScalarError {
    #[error("finite transit time requires q < p (got q={q}, p={p}); the flow is asymptotic")]
    NotTerminal { p: f64, q: f64 },
    #[error("coefficient {name} must be positive (got {value})")]
    InvalidCoefficient { name: &'static str, value: f64 },
    #[error("energy must be nonnegative (got {0})")]
    NegativeEnergy(f64),
    #[error("integration step increased the energy at t={t}")]
    StepTooLarge { t: f64 },
    #[error("no closed-form transit time exists for this form; set an explicit horizon")]
    HorizonRequired,
}

/// Right-hand side family for the energy flow dE/dt = -Omega(E).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OmegaForm {
    /// Omega(E) = beta * E^(q/p)
    Ta { beta: f64, p: f64, q: f64 },
    /// Omega(E) = alpha * E + beta * E^(q/p)
    Fta { alpha: f64, beta: f64, p: f64, q: f64 },
}

impl OmegaForm {
    /// Omega evaluated at `e` (callers keep `e >= 0`).
    pub fn omega(&self, e: f64) -> f64 {
        match *self {
            OmegaForm::Ta { beta, p, q } => beta * e.powf(q / p),
            OmegaForm::Fta { alpha, beta, p, q } => alpha * e + beta * e.powf(q / p),
        }
    }

    fn ratio(&self) -> f64 {
        match *self {
            OmegaForm::Ta { p, q, .. } | OmegaForm::Fta { p, q, .. } => q / p,
        }
    }

    /// Limit of dOmega/dE as E -> 0+. Infinite exactly when the attractor is
    /// terminal; the negation of this value is the limiting slope of dE/dt
    /// with respect to E, whose divergence is the Lipschitz violation that
    /// makes finite-time convergence possible.
    pub fn slope_limit(&self) -> f64 {
        let r = self.ratio();
        match *self {
            OmegaForm::Ta { beta, .. } => {
                if r < 1.0 {
                    f64::INFINITY
                } else if r == 1.0 {
                    beta
                } else {
                    0.0
                }
            }
            OmegaForm::Fta { alpha, beta, .. } => {
                if r < 1.0 {
                    f64::INFINITY
                } else if r == 1.0 {
                    alpha + beta
                } else {
                    alpha
                }
            }
        }
    }
}

/// How the flow approaches E = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttractorClass {
    /// q/p < 1: reached in finite time (slope limit diverges).
    Terminal,
    /// q/p = 1: exponential decay with a finite slope limit.
    Marginal,
    /// q/p > 1: approached only as t -> infinity.
    Asymptotic,
}

pub fn classify_attractor(form: &OmegaForm) -> AttractorClass {
    let r = form.ratio();
    if r < 1.0 {
        AttractorClass::Terminal
    } else if r == 1.0 {
        AttractorClass::Marginal
    } else {
        AttractorClass::Asymptotic
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ScalarError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ScalarError::InvalidCoefficient { name, value })
    }
}

/// Closed-form time for dE/dt = -beta * E^(q/p) to reach 0 from `e0`.
pub fn relaxation_time_ta(e0: f64, beta: f64, p: f64, q: f64) -> Result<f64, ScalarError> {
    ta_flow_time(e0, 0.0, beta, p, q)
}

/// Closed-form transit time of the power-law flow from `e0` down to `e1`.
/// `e1 = 0` gives the full relaxation time.
pub fn ta_flow_time(e0: f64, e1: f64, beta: f64, p: f64, q: f64) -> Result<f64, ScalarError> {
    check_positive("beta", beta)?;
    check_positive("p", p)?;
    check_positive("q", q)?;
    if q >= p {
        return Err(ScalarError::NotTerminal { p, q });
    }
    if e0 < 0.0 {
        return Err(ScalarError::NegativeEnergy(e0));
    }
    if e1 < 0.0 {
        return Err(ScalarError::NegativeEnergy(e1));
    }
    let r = (p - q) / p;
    Ok(p / (beta * (p - q)) * (e0.powf(r) - e1.powf(r)))
}

/// Closed-form time for dE/dt = -(alpha * E + beta * E^(q/p)) to reach 0.
pub fn relaxation_time_fta(
    e0: f64,
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
) -> Result<f64, ScalarError> {
    fta_flow_time(e0, 0.0, alpha, beta, p, q)
}

/// Transit time of the combined flow from `e0` down to `e1`, via the
/// difference of the closed form at the two endpoints (the flow is
/// autonomous, so transit times subtract).
pub fn fta_flow_time(
    e0: f64,
    e1: f64,
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
) -> Result<f64, ScalarError> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("p", p)?;
    check_positive("q", q)?;
    if q >= p {
        return Err(ScalarError::NotTerminal { p, q });
    }
    if e0 < 0.0 {
        return Err(ScalarError::NegativeEnergy(e0));
    }
    if e1 < 0.0 {
        return Err(ScalarError::NegativeEnergy(e1));
    }
    let r = (p - q) / p;
    let at = |e: f64| (alpha / beta * e.powf(r) + 1.0).ln();
    Ok(p / (alpha * (p - q)) * (at(e0) - at(e1)))
}

/// Total sliding-mode time over a sequence of per-stage starting energies:
/// each stage restarts the flow from E_i, so the times add. Finite for any
/// finite sequence when q < p.
pub fn tsm_total_time(energies: &[f64], form: &OmegaForm) -> Result<f64, ScalarError> {
    let mut total = 0.0;
    for &e in energies {
        total += match *form {
            OmegaForm::Ta { beta, p, q } => relaxation_time_ta(e, beta, p, q)?,
            OmegaForm::Fta { alpha, beta, p, q } => relaxation_time_fta(e, alpha, beta, p, q)?,
        };
    }
    Ok(total)
}

/// Closed-form relaxation time when one exists (q < p; an `Fta` form with
/// alpha = 0 decays like the pure power law).
pub fn predicted_time(form: &OmegaForm, e0: f64) -> Option<f64> {
    match *form {
        OmegaForm::Ta { beta, p, q } => relaxation_time_ta(e0, beta, p, q).ok(),
        OmegaForm::Fta { alpha, beta, p, q } => {
            if alpha > 0.0 {
                relaxation_time_fta(e0, alpha, beta, p, q).ok()
            } else {
                relaxation_time_ta(e0, beta, p, q).ok()
            }
        }
    }
}

/// Specification for one oracle integration.
#[derive(Clone, Debug)]
pub struct ScalarFlowSpec {
    pub form: OmegaForm,
    pub e0: f64,
    /// Energy level at which the flow counts as arrived.
    pub tol: f64,
    /// Fixed RK4 step; `None` selects min(1e-4 * E0, 1e-4 * predicted time).
    pub dt: Option<f64>,
    /// Give up after this much flow time; `None` selects 10x the closed-form
    /// prediction and is an error when no prediction exists.
    pub horizon: Option<f64>,
}

impl ScalarFlowSpec {
    pub fn new(form: OmegaForm, e0: f64) -> Self {
        ScalarFlowSpec {
            form,
            e0,
            tol: 1e-12,
            dt: None,
            horizon: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }
}

/// Whether the integration reached the tolerance level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReachOutcome {
    /// First time t with E(t) <= tol.
    Reached(f64),
    /// Horizon exhausted; carries the final energy.
    Unreached { final_energy: f64 },
}

impl ReachOutcome {
    pub fn reach_time(&self) -> Option<f64> {
        match *self {
            ReachOutcome::Reached(t) => Some(t),
            ReachOutcome::Unreached { .. } => None,
        }
    }
}

/// Sampled trajectory of the scalar flow.
#[derive(Clone, Debug, Default)]
pub struct FlowCurve {
    pub t: Vec<f64>,
    pub e: Vec<f64>,
}

impl FlowCurve {
    pub fn final_energy(&self) -> f64 {
        *self.e.last().expect("curve has at least the initial point")
    }

    /// Two-column CSV (`t,E`) with full round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(b"t,E\n")?;
        for (t, e) in self.t.iter().zip(self.e.iter()) {
            writeln!(out, "{:.16e},{:.16e}", t, e)?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_csv(&mut f)
    }
}

// Cap on stored curve samples; reach times are tracked per step regardless.
const MAX_CURVE_SAMPLES: usize = 4000;

fn rk4_step(form: &OmegaForm, e: f64, dt: f64) -> f64 {
    // Stage arguments are clamped at 0: fractional powers of negative
    // intermediates would be NaN, and the flow is defined on E >= 0.
    let f = |x: f64| form.omega(x.max(0.0));
    let k1 = f(e);
    let k2 = f(e - 0.5 * dt * k1);
    let k3 = f(e - 0.5 * dt * k2);
    let k4 = f(e - dt * k3);
    (e - dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0)
}

/// Fixed-step RK4 integration of dE/dt = -Omega(E), clamped at 0 from below.
///
/// Returns the first time E drops to `tol` (or `Unreached` past the horizon)
/// together with a thinned sample of the trajectory.
pub fn integrate_scalar_flow(
    spec: &ScalarFlowSpec,
) -> Result<(ReachOutcome, FlowCurve), ScalarError> {
    match spec.form {
        OmegaForm::Ta { beta, .. } => check_positive("beta", beta)?,
        OmegaForm::Fta { alpha, beta, .. } => {
            check_positive("beta", beta)?;
            if alpha < 0.0 {
                return Err(ScalarError::InvalidCoefficient {
                    name: "alpha",
                    value: alpha,
                });
            }
        }
    }
    if spec.e0 < 0.0 {
        return Err(ScalarError::NegativeEnergy(spec.e0));
    }
    check_positive("tol", spec.tol)?;

    let mut curve = FlowCurve::default();
    curve.t.push(0.0);
    curve.e.push(spec.e0);
    if spec.e0 <= spec.tol {
        return Ok((ReachOutcome::Reached(0.0), curve));
    }

    let predicted = predicted_time(&spec.form, spec.e0);
    let horizon = match (spec.horizon, predicted) {
        (Some(h), _) => h,
        (None, Some(t)) => 10.0 * t,
        (None, None) => return Err(ScalarError::HorizonRequired),
    };
    let dt = match spec.dt {
        Some(dt) => dt,
        None => {
            let base = predicted.unwrap_or(horizon);
            1e-4 * spec.e0.min(base)
        }
    };
    check_positive("dt", dt)?;

    let est_steps = (horizon / dt).ceil() as usize;
    let stride = (est_steps / MAX_CURVE_SAMPLES).max(1);

    let mut e = spec.e0;
    let mut t = 0.0;
    let mut step = 0usize;
    while t < horizon {
        let next = rk4_step(&spec.form, e, dt);
        if next > e {
            return Err(ScalarError::StepTooLarge { t });
        }
        e = next;
        t += dt;
        step += 1;
        if step % stride == 0 {
            curve.t.push(t);
            curve.e.push(e);
        }
        if e <= spec.tol {
            if step % stride != 0 {
                curve.t.push(t);
                curve.e.push(e);
            }
            return Ok((ReachOutcome::Reached(t), curve));
        }
    }
    if step % stride != 0 {
        curve.t.push(t);
        curve.e.push(e);
    }
    Ok((ReachOutcome::Unreached { final_energy: e }, curve))
}

/// Energy after integrating the flow for exactly `t_end`, with the step
/// adjusted so the horizon lands on a step boundary.
pub fn flow_energy_at(form: &OmegaForm, e0: f64, t_end: f64) -> Result<f64, ScalarError> {
    let base = predicted_time(form, e0.max(0.0)).unwrap_or(t_end);
    let dt_target = 1e-4 * e0.min(base).min(t_end);
    flow_energy_at_with_dt(form, e0, t_end, dt_target)
}

/// [`flow_energy_at`] with an explicit target step, for callers that need to
/// resolve the terminal approach more finely than the default.
pub fn flow_energy_at_with_dt(
    form: &OmegaForm,
    e0: f64,
    t_end: f64,
    dt_target: f64,
) -> Result<f64, ScalarError> {
    if e0 < 0.0 {
        return Err(ScalarError::NegativeEnergy(e0));
    }
    check_positive("t_end", t_end)?;
    check_positive("dt", dt_target)?;
    let n = (t_end / dt_target).ceil().max(1.0);
    let dt = t_end / n;
    let mut e = e0;
    for _ in 0..n as u64 {
        e = rk4_step(form, e, dt);
        if e == 0.0 {
            break;
        }
    }
    Ok(e)
}
