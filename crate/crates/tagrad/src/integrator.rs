//! The discrete optimization loop: forward-Euler integration of the
//! gradient flow dw/dt = -gamma * grad E, one update per iteration,
//! recording a full trajectory.
//!
//! The loop is deliberately dumb. All adaptivity lives in the rate rule;
//! divergence is an outcome, not an error, because the unbounded rules are
//! designed to blow up near non-global minima.

use crate::baselines::{
    adagrad_step, adam_step, rmsprop_step, sgd_step, AdaGradHyper, AdamHyper, BaselineState,
    RmsPropHyper, SgdHyper,
};
use crate::eval::{evaluate, GradEval, Objective};
use crate::rate::LrRule;
use crate::vector::{ParamVector, StepError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Runs past this multiple of the initial energy end as Diverged.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchMode {
    /// One full-batch gradient step per iteration (the default; keeps runs
    /// deterministic and comparable to the scalar-flow analysis).
    Full,
    /// One epoch of shuffled mini-batch steps per iteration. Objectives
    /// without sample structure fall back to full batches.
    Minibatch { size: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    /// Integration step eta > 0 of the Euler update. The baseline
    /// optimizers carry their own learning rate and ignore it.
    pub eta: f64,
    pub max_iters: u32,
    /// Stop as soon as the recorded energy is <= this.
    pub stop_energy: f64,
    pub batch_mode: BatchMode,
    /// Seeds the starting point and the mini-batch shuffle stream.
    pub seed: u64,
}

impl OptConfig {
    pub fn new(eta: f64, max_iters: u32, stop_energy: f64) -> Self {
        OptConfig {
            eta,
            max_iters,
            stop_energy,
            batch_mode: BatchMode::Full,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_batch(mut self, batch_mode: BatchMode) -> Self {
        self.batch_mode = batch_mode;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.eta > 0.0
            && self.eta.is_finite()
            && self.max_iters >= 1
            && self.stop_energy >= 0.0
            && match self.batch_mode {
                BatchMode::Full => true,
                BatchMode::Minibatch { size } => size >= 1,
            }
    }
}

/// State at the start of iteration `iter`, plus the update the optimizer
/// chose there. `step_norm` is the exact eta * gamma * |grad| for rule
/// methods in full-batch mode; for moment-based baselines and for mini-batch
/// epochs it is the measured displacement |w_next - w|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iter: u32,
    pub energy: f64,
    pub grad_norm: f64,
    pub gamma: f64,
    pub step_norm: f64,
    pub clamped: bool,
    /// Seconds since the run loop started, measured when the point was
    /// recorded. Excluded from determinism comparisons.
    pub elapsed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Energy reached stop_energy at this iteration.
    Converged(u32),
    /// Iteration cap hit with the energy still above stop_energy.
    MaxIters,
    /// Non-finite update, failed evaluation, or energy blow-up at this
    /// iteration.
    Diverged(u32),
}

/// Full log of one optimization run.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub config: OptConfig,
    pub points: Vec<TrajectoryPoint>,
    pub outcome: Outcome,
    pub wall_clock_total: f64,
}

impl RunRecord {
    /// Energy of the last recorded point (NaN for the empty trajectory of a
    /// run that diverged before its first evaluation).
    pub fn final_energy(&self) -> f64 {
        self.points.last().map(|p| p.energy).unwrap_or(f64::NAN)
    }

    /// First iteration whose recorded energy is <= threshold.
    pub fn converge_iter(&self, threshold: f64) -> Option<u32> {
        self.points
            .iter()
            .find(|p| p.energy <= threshold)
            .map(|p| p.iter)
    }

    /// Number of iterations where a rate safeguard fired.
    pub fn clamp_events(&self) -> usize {
        self.points.iter().filter(|p| p.clamped).count()
    }

    /// Bitwise equality of everything except wall-clock fields. This is the
    /// determinism contract: two runs with identical (objective, method,
    /// config) agree on it even though their timings differ.
    pub fn dynamics_eq(&self, other: &RunRecord) -> bool {
        self.label == other.label
            && self.outcome == other.outcome
            && self.points.len() == other.points.len()
            && self.points.iter().zip(other.points.iter()).all(|(a, b)| {
                a.iter == b.iter
                    && a.energy.to_bits() == b.energy.to_bits()
                    && a.grad_norm.to_bits() == b.grad_norm.to_bits()
                    && a.gamma.to_bits() == b.gamma.to_bits()
                    && a.step_norm.to_bits() == b.step_norm.to_bits()
                    && a.clamped == b.clamped
            })
    }
}

/// What to run: an adaptive/fixed rate rule under the Euler loop, or one of
/// the reference optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Rule(LrRule),
    Sgd(SgdHyper),
    Adam(AdamHyper),
    RmsProp(RmsPropHyper),
    AdaGrad(AdaGradHyper),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Rule(rule) => rule.describe(),
            Method::Sgd(h) => format!("sgd(lr={})", h.lr),
            Method::Adam(h) => format!("adam(lr={})", h.lr),
            Method::RmsProp(h) => format!("rmsprop(lr={})", h.lr),
            Method::AdaGrad(h) => format!("adagrad(lr={})", h.lr),
        }
    }
}

/// One Euler update w - eta * gamma * grad E, with gamma from the rule.
/// The update norm is exactly eta * gamma * |grad E|.
pub fn step(
    w: &ParamVector,
    g: &GradEval,
    rule: &LrRule,
    eta: f64,
) -> Result<ParamVector, StepError> {
    let out = rule.rate(g);
    let next = w.sub_scaled(eta * out.gamma, &g.gradient);
    match next.first_non_finite() {
        Some(index) => Err(StepError::NonFiniteStep { index }),
        None => Ok(next),
    }
}

/// Convenience wrapper over [`run_method`] for rate-rule runs.
pub fn run(objective: &dyn Objective, rule: &LrRule, config: &OptConfig) -> RunRecord {
    run_method(objective, &Method::Rule(*rule), config)
}

// Diagnostics recorded alongside a proposed update.
struct Proposal {
    diag: Option<(f64, f64, bool)>, // gamma, step_norm, clamped
    next: Option<ParamVector>,
}

fn baseline_step(
    method: &Method,
    state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
) -> Option<(f64, Result<ParamVector, StepError>)> {
    match method {
        Method::Rule(_) => None,
        Method::Sgd(h) => Some((h.lr, sgd_step(state, w, g, h))),
        Method::Adam(h) => Some((h.lr, adam_step(state, w, g, h))),
        Method::RmsProp(h) => Some((h.lr, rmsprop_step(state, w, g, h))),
        Method::AdaGrad(h) => Some((h.lr, adagrad_step(state, w, g, h))),
    }
}

fn propose_full(
    method: &Method,
    state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
    eta: f64,
) -> Proposal {
    if let Method::Rule(rule) = method {
        let out = rule.rate(g);
        return Proposal {
            diag: Some((out.gamma, eta * out.gamma * g.grad_norm, out.clamped)),
            next: step(w, g, rule, eta).ok(),
        };
    }
    let (lr, result) = baseline_step(method, state, w, g).expect("non-rule method");
    let next = result.ok();
    Proposal {
        diag: next.as_ref().map(|n| (lr, n.distance(w), false)),
        next,
    }
}

/// One epoch of shuffled mini-batch updates starting from `w`.
#[allow(clippy::too_many_arguments)]
fn propose_epoch(
    objective: &dyn Objective,
    method: &Method,
    state: &mut BaselineState,
    rng: &mut ChaCha8Rng,
    w: &ParamVector,
    full: &GradEval,
    eta: f64,
    size: usize,
    n: usize,
) -> Proposal {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut cur = w.clone();
    let mut any_clamped = false;
    for chunk in indices.chunks(size) {
        let Ok(bg) = objective.eval_batch(&cur, chunk) else {
            return Proposal {
                diag: None,
                next: None,
            };
        };
        let applied = if let Method::Rule(rule) = method {
            any_clamped |= rule.rate(&bg).clamped;
            step(&cur, &bg, rule, eta)
        } else {
            baseline_step(method, state, &cur, &bg)
                .expect("non-rule method")
                .1
        };
        match applied {
            Ok(next) => cur = next,
            Err(_) => {
                return Proposal {
                    diag: None,
                    next: None,
                }
            }
        }
    }
    let gamma = match method {
        // Diagnostic only: the rate the rule would choose at the epoch
        // boundary, comparable across methods.
        Method::Rule(rule) => rule.rate(full).gamma,
        Method::Sgd(h) => h.lr,
        Method::Adam(h) => h.lr,
        Method::RmsProp(h) => h.lr,
        Method::AdaGrad(h) => h.lr,
    };
    Proposal {
        diag: Some((gamma, cur.distance(w), any_clamped)),
        next: Some(cur),
    }
}

/// Runs the optimization loop to convergence, the iteration cap, or
/// divergence. Each iteration evaluates the full objective, records a
/// trajectory point, then applies the proposed update. Deterministic up to
/// wall-clock for fixed (objective, method, config).
pub fn run_method(objective: &dyn Objective, method: &Method, config: &OptConfig) -> RunRecord {
    assert!(config.is_valid(), "invalid OptConfig {config:?}");
    let mut w = objective.initial_point(config.seed);
    let mut state = BaselineState::new(w.dim());
    // The shuffle stream is decoupled from the init seed so switching batch
    // modes never moves the starting point.
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xD1B5_4A32_D192_ED03);
    let batch = match (config.batch_mode, objective.sample_count()) {
        (BatchMode::Minibatch { size }, Some(n)) => Some((size.min(n), n)),
        _ => None,
    };

    let start = Instant::now();
    let mut points: Vec<TrajectoryPoint> = Vec::new();
    let mut iter: u32 = 0;
    let mut initial_energy = f64::INFINITY;

    let outcome = loop {
        let Ok(g) = evaluate(objective, &w) else {
            break Outcome::Diverged(iter);
        };
        if iter == 0 {
            initial_energy = g.energy;
        }

        let proposal = match batch {
            None => propose_full(method, &mut state, &w, &g, config.eta),
            Some((size, n)) => propose_epoch(
                objective,
                method,
                &mut state,
                &mut shuffle_rng,
                &w,
                &g,
                config.eta,
                size,
                n,
            ),
        };

        match proposal.diag {
            Some((gamma, step_norm, clamped))
                if gamma.is_finite() && step_norm.is_finite() =>
            {
                points.push(TrajectoryPoint {
                    iter,
                    energy: g.energy,
                    grad_norm: g.grad_norm,
                    gamma,
                    step_norm,
                    clamped,
                    elapsed: start.elapsed().as_secs_f64(),
                });
            }
            _ => break Outcome::Diverged(iter),
        }

        if g.energy <= config.stop_energy {
            break Outcome::Converged(iter);
        }
        if iter >= config.max_iters {
            break Outcome::MaxIters;
        }
        if g.energy > DIVERGENCE_FACTOR * initial_energy {
            break Outcome::Diverged(iter);
        }
        match proposal.next {
            Some(next) => w = next,
            None => break Outcome::Diverged(iter),
        }
        iter += 1;
    };

    RunRecord {
        label: method.label(),
        config: *config,
        points,
        outcome,
        wall_clock_total: start.elapsed().as_secs_f64(),
    }
}
