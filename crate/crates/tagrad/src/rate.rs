//! The five learning-rate rules and their attractor functions.
//!
//! Every adaptive rule is built from an attractor function Omega(E) and
//! chooses gamma so that the continuous-time flow dw/dt = -gamma * grad E
//! decouples into the scalar ODE dE/dt = -Omega(E) (or its gradient-scaled
//! placid variant). The discrete loop lives in [`crate::integrator`]; the
//! scalar ODE and its closed-form transit times live in [`crate::scalar`].
//!
//! | rule  | gamma                                                  | induced dE/dt            |
//! |-------|--------------------------------------------------------|--------------------------|
//! | fixed | constant                                               | -gamma * |grad|^2        |
//! | ta    | beta * E^(q/p) / |grad|^2                              | -beta * E^(q/p)          |
//! | fta   | (alpha * E + beta * E^(q/p)) / |grad|^2                | -(alpha*E + beta*E^(q/p))|
//! | pta   | beta * E^(q/p) / |grad| * delta(1/|grad|)              | -|grad| * beta*E^(q/p) * delta |
//! | pfta  | (alpha*E + beta*E^(q/p)) / |grad| * delta(1/|grad|)    | -|grad| * (...) * delta  |
//!
//! delta is the logistic sigmoid. The placid rules (pta, pfta) keep the
//! effective step gamma * |grad| bounded by Omega(E) for every input; ta and
//! fta blow up as |grad| -> 0 and rely on the configurable `gamma_max` clamp
//! and `eps_grad` floor to stay finite.

use crate::eval::GradEval;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default ceiling on gamma for the unbounded rules (ta, fta).
pub const DEFAULT_GAMMA_MAX: f64 = 1e6;
/// Default floor on the gradient norm appearing in denominators.
pub const DEFAULT_EPS_GRAD: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RateError {
    #[error("energy must be nonnegative (got {0})")]
    NegativeEnergy(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
}

/// Non-fatal configuration findings from [`LrRule::validate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleWarning {
    /// q >= p: the attractor is not terminal; the rule still runs so the
    /// asymptotic branches of the classification stay testable.
    NotTerminal { p: f64, q: f64 },
}

/// Which formula produces gamma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Fixed { gamma: f64 },
    Ta { beta: f64, p: f64, q: f64 },
    Fta { alpha: f64, beta: f64, p: f64, q: f64 },
    Pta { beta: f64, p: f64, q: f64 },
    Pfta { alpha: f64, beta: f64, p: f64, q: f64 },
}

/// A rate rule plus the two singularity safeguards.
///
/// `gamma_max` caps gamma for ta/fta (the placid rules are self-bounding and
/// ignore it); `eps_grad` floors the gradient norm in every denominator.
/// Both default high/low enough to be invisible away from minima.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrRule {
    pub kind: RuleKind,
    pub gamma_max: f64,
    pub eps_grad: f64,
}

/// One rate evaluation: the learning rate, the attractor value Omega(E)
/// behind it, and whether a safeguard fired.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateOutput {
    pub gamma: f64,
    /// beta * E^(q/p) (ta, pta), alpha * E + beta * E^(q/p) (fta, pfta), or
    /// the induced decay gamma * |grad|^2 for the fixed rule.
    pub omega: f64,
    /// True when the eps_grad floor or the gamma_max clamp changed gamma.
    pub clamped: bool,
}

/// Logistic sigmoid with exact saturation: inputs beyond +/-40 return 1 or 0
/// (the true value differs by < 1e-17, below f64 resolution around 1).
pub fn sigmoid(x: f64) -> f64 {
    if x > 40.0 {
        1.0
    } else if x < -40.0 {
        0.0
    } else {
        1.0 / (1.0 + (-x).exp())
    }
}

/// Omega(E) = beta * E^(q/p).
pub fn omega_ta(e: f64, beta: f64, p: f64, q: f64) -> Result<f64, RateError> {
    if e < 0.0 {
        return Err(RateError::NegativeEnergy(e));
    }
    Ok(beta * e.powf(q / p))
}

/// Omega(E) = alpha * E + beta * E^(q/p).
pub fn omega_fta(e: f64, alpha: f64, beta: f64, p: f64, q: f64) -> Result<f64, RateError> {
    if e < 0.0 {
        return Err(RateError::NegativeEnergy(e));
    }
    Ok(alpha * e + beta * e.powf(q / p))
}

/// gamma = Omega(E) / max(|grad|^2, eps^2), capped at gamma_max. Used by the
/// ta and fta rules, which differ only in Omega.
fn unbounded_rate(omega: f64, g: &GradEval, rule: &LrRule) -> RateOutput {
    let floor = rule.eps_grad * rule.eps_grad;
    let floored = g.grad_norm_sq < floor;
    let raw = omega / g.grad_norm_sq.max(floor);
    let gamma = raw.min(rule.gamma_max);
    RateOutput {
        gamma,
        omega,
        clamped: floored || raw > rule.gamma_max,
    }
}

/// gamma = Omega(E) / max(|grad|, eps) * delta(1 / max(|grad|, eps)). The
/// sigmoid factor bounds gamma * |grad| by Omega(E) for every input, so no
/// gamma_max is applied.
fn placid_rate(omega: f64, g: &GradEval, rule: &LrRule) -> RateOutput {
    let floored = g.grad_norm < rule.eps_grad;
    let denom = g.grad_norm.max(rule.eps_grad);
    let gamma = omega / denom * sigmoid(1.0 / denom);
    RateOutput {
        gamma,
        omega,
        clamped: floored,
    }
}

/// Rate for the plain terminal-attractor rule. Panics if the rule is not
/// the `Ta` variant; use [`LrRule::rate`] to dispatch on the tag.
pub fn lr_ta(g: &GradEval, rule: &LrRule) -> RateOutput {
    let RuleKind::Ta { beta, p, q } = rule.kind else {
        panic!("lr_ta requires the ta variant, got {:?}", rule.kind);
    };
    let omega = omega_ta(g.energy, beta, p, q).expect("GradEval energy is nonnegative");
    unbounded_rate(omega, g, rule)
}

/// Rate for the fast terminal-attractor rule (linear term added to Omega).
pub fn lr_fta(g: &GradEval, rule: &LrRule) -> RateOutput {
    let RuleKind::Fta { alpha, beta, p, q } = rule.kind else {
        panic!("lr_fta requires the fta variant, got {:?}", rule.kind);
    };
    let omega = omega_fta(g.energy, alpha, beta, p, q).expect("GradEval energy is nonnegative");
    unbounded_rate(omega, g, rule)
}

/// Rate for the placid terminal-attractor rule.
pub fn lr_pta(g: &GradEval, rule: &LrRule) -> RateOutput {
    let RuleKind::Pta { beta, p, q } = rule.kind else {
        panic!("lr_pta requires the pta variant, got {:?}", rule.kind);
    };
    let omega = omega_ta(g.energy, beta, p, q).expect("GradEval energy is nonnegative");
    placid_rate(omega, g, rule)
}

/// Rate for the placid fast terminal-attractor rule.
pub fn lr_pfta(g: &GradEval, rule: &LrRule) -> RateOutput {
    let RuleKind::Pfta { alpha, beta, p, q } = rule.kind else {
        panic!("lr_pfta requires the pfta variant, got {:?}", rule.kind);
    };
    let omega = omega_fta(g.energy, alpha, beta, p, q).expect("GradEval energy is nonnegative");
    placid_rate(omega, g, rule)
}

/// dE/dt induced by a rate: the chain rule along dw/dt = -gamma * grad E
/// gives dE/dt = -gamma * |grad E|^2. Test helper for checking that each
/// rule's gamma reproduces its designed scalar flow.
pub fn energy_decay_rate(rate: &RateOutput, g: &GradEval) -> f64 {
    -(rate.gamma * g.grad_norm_sq)
}

impl LrRule {
    fn with_kind(kind: RuleKind) -> Self {
        LrRule {
            kind,
            gamma_max: DEFAULT_GAMMA_MAX,
            eps_grad: DEFAULT_EPS_GRAD,
        }
    }

    pub fn fixed(gamma: f64) -> Self {
        Self::with_kind(RuleKind::Fixed { gamma })
    }

    pub fn ta(beta: f64, p: f64, q: f64) -> Self {
        Self::with_kind(RuleKind::Ta { beta, p, q })
    }

    pub fn fta(alpha: f64, beta: f64, p: f64, q: f64) -> Self {
        Self::with_kind(RuleKind::Fta { alpha, beta, p, q })
    }

    pub fn pta(beta: f64, p: f64, q: f64) -> Self {
        Self::with_kind(RuleKind::Pta { beta, p, q })
    }

    pub fn pfta(alpha: f64, beta: f64, p: f64, q: f64) -> Self {
        Self::with_kind(RuleKind::Pfta { alpha, beta, p, q })
    }

    pub fn with_gamma_max(mut self, gamma_max: f64) -> Self {
        self.gamma_max = gamma_max;
        self
    }

    pub fn with_eps_grad(mut self, eps_grad: f64) -> Self {
        self.eps_grad = eps_grad;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            RuleKind::Fixed { .. } => "fixed",
            RuleKind::Ta { .. } => "ta",
            RuleKind::Fta { .. } => "fta",
            RuleKind::Pta { .. } => "pta",
            RuleKind::Pfta { .. } => "pfta",
        }
    }

    /// Human-readable descriptor used as the default run label.
    pub fn describe(&self) -> String {
        match self.kind {
            RuleKind::Fixed { gamma } => format!("fixed(gamma={gamma})"),
            RuleKind::Ta { beta, p, q } => format!("ta(beta={beta},q/p={})", q / p),
            RuleKind::Fta { alpha, beta, p, q } => {
                format!("fta(alpha={alpha},beta={beta},q/p={})", q / p)
            }
            RuleKind::Pta { beta, p, q } => format!("pta(beta={beta},q/p={})", q / p),
            RuleKind::Pfta { alpha, beta, p, q } => {
                format!("pfta(alpha={alpha},beta={beta},q/p={})", q / p)
            }
        }
    }

    /// Checks coefficient signs. q >= p is reported as a warning, not an
    /// error, because the asymptotic configurations are legitimate inputs
    /// to the classification machinery.
    pub fn validate(&self) -> Result<Vec<RuleWarning>, RuleError> {
        let check = |name: &'static str, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(RuleError::NonPositive { name, value })
            }
        };
        check("gamma_max", self.gamma_max)?;
        check("eps_grad", self.eps_grad)?;
        let mut warnings = Vec::new();
        match self.kind {
            RuleKind::Fixed { gamma } => check("gamma", gamma)?,
            RuleKind::Ta { beta, p, q } | RuleKind::Pta { beta, p, q } => {
                check("beta", beta)?;
                check("p", p)?;
                check("q", q)?;
                if q >= p {
                    warnings.push(RuleWarning::NotTerminal { p, q });
                }
            }
            RuleKind::Fta { alpha, beta, p, q } | RuleKind::Pfta { alpha, beta, p, q } => {
                check("alpha", alpha)?;
                check("beta", beta)?;
                check("p", p)?;
                check("q", q)?;
                if q >= p {
                    warnings.push(RuleWarning::NotTerminal { p, q });
                }
            }
        }
        Ok(warnings)
    }

    /// Evaluates the rule at a gradient observation.
    pub fn rate(&self, g: &GradEval) -> RateOutput {
        match self.kind {
            RuleKind::Fixed { gamma } => RateOutput {
                gamma,
                omega: gamma * g.grad_norm_sq,
                clamped: false,
            },
            RuleKind::Ta { .. } => lr_ta(g, self),
            RuleKind::Fta { .. } => lr_fta(g, self),
            RuleKind::Pta { .. } => lr_pta(g, self),
            RuleKind::Pfta { .. } => lr_pfta(g, self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_with(energy: f64, grad: f64) -> GradEval {
        GradEval::new(energy, vec![grad].into()).unwrap()
    }

    #[test]
    fn omega_ta_examples() {
        assert_eq!(omega_ta(0.0, 0.1, 100.0, 65.0).unwrap(), 0.0);
        assert_eq!(omega_ta(1.0, 0.1, 100.0, 65.0).unwrap(), 0.1);
        assert_eq!(omega_ta(0.25, 1.0, 2.0, 1.0).unwrap(), 0.5);
        assert_eq!(
            omega_ta(-1.0, 0.1, 2.0, 1.0),
            Err(RateError::NegativeEnergy(-1.0))
        );
    }

    #[test]
    fn omega_fta_examples() {
        assert_eq!(omega_fta(0.0, 0.03, 0.1, 100.0, 65.0).unwrap(), 0.0);
        assert_eq!(omega_fta(1.0, 0.03, 0.1, 100.0, 65.0).unwrap(), 0.13);
        assert_eq!(omega_fta(4.0, 1.0, 1.0, 2.0, 1.0).unwrap(), 6.0);
    }

    #[test]
    fn ta_rate_examples() {
        let rule = LrRule::ta(0.1, 100.0, 65.0);
        let out = rule.rate(&eval_with(1.0, 2.0));
        assert_eq!(out.gamma, 0.025);
        assert!(!out.clamped);

        let zero_energy = rule.rate(&eval_with(0.0, 3.0));
        assert_eq!(zero_energy.gamma, 0.0);

        // Vanishing gradient with positive energy: clamp takes over.
        let rule = LrRule::ta(1.0, 2.0, 1.0);
        let out = rule.rate(&eval_with(1.0, 0.0));
        assert_eq!(out.gamma, 1e6);
        assert!(out.clamped);
    }

    #[test]
    fn unclamped_ta_rate_diverges_as_gradient_vanishes() {
        let rule = LrRule::ta(1.0, 2.0, 1.0).with_gamma_max(f64::MAX);
        let mut last = 0.0;
        for g in [1e-1, 1e-3, 1e-5, 1e-7] {
            let out = rule.rate(&eval_with(1.0, g));
            assert!(out.gamma > last);
            last = out.gamma;
        }
        assert!(last > 1e12);
    }

    #[test]
    fn fta_rate_examples() {
        let rule = LrRule::fta(0.03, 0.1, 100.0, 65.0);
        let out = rule.rate(&eval_with(1.0, 1.0));
        assert_eq!(out.gamma, 0.13);
        assert_eq!(out.omega, 0.13);
        assert!(!out.clamped);

        assert_eq!(rule.rate(&eval_with(0.0, 1.0)).gamma, 0.0);

        let tiny = rule.rate(&eval_with(1.0, 1e-150));
        assert_eq!(tiny.gamma, rule.gamma_max);
        assert!(tiny.clamped);
    }

    #[test]
    fn pta_rate_examples() {
        let rule = LrRule::pta(0.09, 10.0, 7.0);
        let out = rule.rate(&eval_with(1.0, 1.0));
        let expected = 0.09 * sigmoid(1.0);
        assert_eq!(out.gamma, expected);
        assert!((out.gamma - 0.0657953).abs() < 1e-7);
        assert!(!out.clamped);

        assert_eq!(rule.rate(&eval_with(0.0, 1.0)).gamma, 0.0);

        // Huge gradient: the effective step tends to beta * delta(0) = beta/2.
        let rule = LrRule::pta(1.0, 2.0, 1.0);
        let g = eval_with(1.0, 1e12);
        let out = rule.rate(&g);
        assert!((out.gamma * g.grad_norm - 0.5).abs() < 1e-9);
    }

    #[test]
    fn pfta_rate_examples() {
        let rule = LrRule::pfta(0.03, 0.1, 100.0, 65.0);
        let out = rule.rate(&eval_with(1.0, 1.0));
        assert_eq!(out.gamma, 0.13 * sigmoid(1.0));
        assert!((out.gamma - 0.0950376).abs() < 1e-7);

        assert_eq!(rule.rate(&eval_with(0.0, 1.0)).gamma, 0.0);

        // Step-norm bound gamma * |grad| <= alpha*E + beta*E^(q/p).
        for grad in [0.0, 1e-300, 1e-6, 1.0, 1e6, 1e300] {
            let g = eval_with(2.0, grad);
            let out = rule.rate(&g);
            assert!(out.gamma * g.grad_norm <= out.omega + 1e-12);
        }
    }

    #[test]
    fn sigmoid_saturates_exactly() {
        assert_eq!(sigmoid(1e12), 1.0);
        assert_eq!(sigmoid(41.0), 1.0);
        assert_eq!(sigmoid(-41.0), 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1e-12) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn fixed_rate_reports_induced_decay() {
        let rule = LrRule::fixed(0.1);
        let g = eval_with(4.0, 4.0);
        let out = rule.rate(&g);
        assert_eq!(out.gamma, 0.1);
        assert_eq!(out.omega, 0.1 * 16.0);
        assert!(!out.clamped);
    }

    #[test]
    fn decay_rate_matches_designed_flow_when_unclamped() {
        let g = eval_with(0.7, 1.3);
        let ta = LrRule::ta(1.0, 3.0, 1.0).rate(&g);
        let target = omega_ta(0.7, 1.0, 3.0, 1.0).unwrap();
        assert!((energy_decay_rate(&ta, &g) + target).abs() <= 1e-12 * target);

        let pta = LrRule::pta(1.0, 3.0, 1.0).rate(&g);
        let placid_target = g.grad_norm * target * sigmoid(1.0 / g.grad_norm);
        assert!((energy_decay_rate(&pta, &g) + placid_target).abs() <= 1e-12 * placid_target);
    }

    #[test]
    fn validate_flags_and_errors() {
        assert_eq!(LrRule::ta(1.0, 3.0, 1.0).validate(), Ok(vec![]));
        assert_eq!(
            LrRule::ta(1.0, 1.0, 3.0).validate(),
            Ok(vec![RuleWarning::NotTerminal { p: 1.0, q: 3.0 }])
        );
        assert!(matches!(
            LrRule::ta(0.0, 3.0, 1.0).validate(),
            Err(RuleError::NonPositive { name: "beta", .. })
        ));
        assert!(matches!(
            LrRule::fta(0.0, 1.0, 3.0, 1.0).validate(),
            Err(RuleError::NonPositive { name: "alpha", .. })
        ));
        assert!(matches!(
            LrRule::fixed(-0.1).validate(),
            Err(RuleError::NonPositive { name: "gamma", .. })
        ));
    }
}
