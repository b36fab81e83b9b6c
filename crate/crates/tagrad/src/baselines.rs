//! Reference optimizers for comparison runs: fixed-rate SGD, Adam, RMSProp,
//! and AdaGrad, in their textbook forms.
//!
//! These take their own learning rate and do not consume the integration
//! step eta; benchmark configs quote them as "SGD(0.04)" etc. with the rate
//! already folded in. Default rates follow the comparison table the adaptive
//! rules are benchmarked against (AdaGrad, absent from that table, uses the
//! common 0.01 default).

use crate::eval::GradEval;
use crate::vector::{ParamVector, StepError};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgdHyper {
    pub lr: f64,
}

impl Default for SgdHyper {
    fn default() -> Self {
        SgdHyper { lr: 0.04 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            lr: 0.055,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmsPropHyper {
    pub lr: f64,
    pub decay: f64,
    pub eps: f64,
}

impl Default for RmsPropHyper {
    fn default() -> Self {
        RmsPropHyper {
            lr: 0.095,
            decay: 0.99,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaGradHyper {
    pub lr: f64,
    pub eps: f64,
}

impl Default for AdaGradHyper {
    fn default() -> Self {
        AdaGradHyper {
            lr: 0.01,
            eps: 1e-8,
        }
    }
}

/// Per-run optimizer memory. Each method touches its own subset: Adam uses
/// `m`/`v`/`t`, RMSProp uses `v`, AdaGrad uses `acc`; SGD none.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineState {
    /// First-moment estimate.
    pub m: Vec<f64>,
    /// Second-moment estimate (entries stay >= 0).
    pub v: Vec<f64>,
    /// Squared-gradient accumulator (entries stay >= 0).
    pub acc: Vec<f64>,
    /// Completed steps, for bias correction.
    pub t: u64,
}

impl BaselineState {
    pub fn new(dim: usize) -> Self {
        BaselineState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            acc: vec![0.0; dim],
            t: 0,
        }
    }
}

fn finished(w: ParamVector) -> Result<ParamVector, StepError> {
    match w.first_non_finite() {
        Some(index) => Err(StepError::NonFiniteStep { index }),
        None => Ok(w),
    }
}

pub fn sgd_step(
    _state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
    hyper: &SgdHyper,
) -> Result<ParamVector, StepError> {
    finished(w.sub_scaled(hyper.lr, &g.gradient))
}

pub fn adam_step(
    state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
    hyper: &AdamHyper,
) -> Result<ParamVector, StepError> {
    state.t += 1;
    let bc1 = 1.0 - hyper.beta1.powi(state.t as i32);
    let bc2 = 1.0 - hyper.beta2.powi(state.t as i32);
    let mut next = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let gi = g.gradient[i];
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * gi;
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * gi * gi;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        next.push(w[i] - hyper.lr * m_hat / (v_hat.sqrt() + hyper.eps));
    }
    finished(ParamVector::new(next))
}

pub fn rmsprop_step(
    state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
    hyper: &RmsPropHyper,
) -> Result<ParamVector, StepError> {
    let mut next = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let gi = g.gradient[i];
        state.v[i] = hyper.decay * state.v[i] + (1.0 - hyper.decay) * gi * gi;
        next.push(w[i] - hyper.lr * gi / (state.v[i].sqrt() + hyper.eps));
    }
    finished(ParamVector::new(next))
}

pub fn adagrad_step(
    state: &mut BaselineState,
    w: &ParamVector,
    g: &GradEval,
    hyper: &AdaGradHyper,
) -> Result<ParamVector, StepError> {
    let mut next = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let gi = g.gradient[i];
        state.acc[i] += gi * gi;
        next.push(w[i] - hyper.lr * gi / (state.acc[i].sqrt() + hyper.eps));
    }
    finished(ParamVector::new(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad(energy: f64, g: Vec<f64>) -> GradEval {
        GradEval::new(energy, g.into()).unwrap()
    }

    #[test]
    fn sgd_step_hand_value() {
        // E = w^2 at w = 1: gradient 2, lr 0.04 -> 0.92.
        let mut state = BaselineState::new(1);
        let w = ParamVector::new(vec![1.0]);
        let next = sgd_step(&mut state, &w, &grad(1.0, vec![2.0]), &SgdHyper::default()).unwrap();
        assert_eq!(next.as_slice(), &[0.92]);
    }

    #[test]
    fn adam_first_step_has_lr_magnitude() {
        // Bias correction makes m_hat = g and v_hat = g^2 at t = 1, so the
        // update is lr * sign(g) up to eps.
        let hyper = AdamHyper::default();
        let mut state = BaselineState::new(2);
        let w = ParamVector::new(vec![1.0, -1.0]);
        let next = adam_step(&mut state, &w, &grad(1.0, vec![3.0, -0.04]), &hyper).unwrap();
        assert!((next[0] - (1.0 - hyper.lr)).abs() < 1e-7);
        assert!((next[1] - (-1.0 + hyper.lr)).abs() < 1e-5);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn rmsprop_step_hand_value() {
        let hyper = RmsPropHyper::default();
        let mut state = BaselineState::new(1);
        let w = ParamVector::new(vec![1.0]);
        let next = rmsprop_step(&mut state, &w, &grad(1.0, vec![2.0]), &hyper).unwrap();
        // v = 0.01 * 4 = 0.04, update = 0.095 * 2 / (0.2 + 1e-8).
        let expected = 1.0 - 0.095 * 2.0 / (0.04f64.sqrt() + 1e-8);
        assert!((next[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn adagrad_step_hand_value() {
        let hyper = AdaGradHyper::default();
        let mut state = BaselineState::new(1);
        let w = ParamVector::new(vec![1.0]);
        let next = adagrad_step(&mut state, &w, &grad(1.0, vec![2.0]), &hyper).unwrap();
        assert!((next[0] - 0.99).abs() < 1e-8);
        assert_eq!(state.acc[0], 4.0);
    }

    #[test]
    fn zero_gradient_leaves_weights_fixed() {
        let w = ParamVector::new(vec![0.5, -0.5]);
        let g = grad(1.0, vec![0.0, 0.0]);
        let mut state = BaselineState::new(2);
        state.m = vec![0.4, -0.4];
        state.v = vec![0.1, 0.1];

        assert_eq!(
            sgd_step(&mut state, &w, &g, &SgdHyper::default()).unwrap(),
            w
        );
        assert_eq!(
            rmsprop_step(&mut state, &w, &g, &RmsPropHyper::default()).unwrap(),
            w
        );
        assert_eq!(
            adagrad_step(&mut state, &w, &g, &AdaGradHyper::default()).unwrap(),
            w
        );
        // Adam's first moment decays toward zero but a nonzero residual
        // still moves w; with zero moments it stays put exactly.
        let mut fresh = BaselineState::new(2);
        assert_eq!(
            adam_step(&mut fresh, &w, &g, &AdamHyper::default()).unwrap(),
            w
        );
    }

    #[test]
    fn moment_methods_are_scale_invariant_in_small_eps_limit() {
        // Rescaling E by 10 rescales g by 10; with eps ~ 0 the first-step
        // update of Adam/RMSProp/AdaGrad is unchanged.
        let w = ParamVector::new(vec![1.0, 2.0]);
        let g1 = grad(1.0, vec![0.3, -1.7]);
        let g10 = grad(10.0, vec![3.0, -17.0]);

        let adam = AdamHyper {
            eps: 1e-12,
            ..AdamHyper::default()
        };
        let a1 = adam_step(&mut BaselineState::new(2), &w, &g1, &adam).unwrap();
        let a10 = adam_step(&mut BaselineState::new(2), &w, &g10, &adam).unwrap();
        assert!(a1.distance(&a10) < 1e-6);

        let rms = RmsPropHyper {
            eps: 1e-12,
            ..RmsPropHyper::default()
        };
        let r1 = rmsprop_step(&mut BaselineState::new(2), &w, &g1, &rms).unwrap();
        let r10 = rmsprop_step(&mut BaselineState::new(2), &w, &g10, &rms).unwrap();
        assert!(r1.distance(&r10) < 1e-6);

        let ada = AdaGradHyper {
            eps: 1e-12,
            ..AdaGradHyper::default()
        };
        let d1 = adagrad_step(&mut BaselineState::new(2), &w, &g1, &ada).unwrap();
        let d10 = adagrad_step(&mut BaselineState::new(2), &w, &g10, &ada).unwrap();
        assert!(d1.distance(&d10) < 1e-6);
    }

    #[test]
    fn overflow_is_reported_not_propagated() {
        let mut state = BaselineState::new(1);
        let w = ParamVector::new(vec![1e308]);
        let g = grad(1.0, vec![-1e308]);
        let hyper = SgdHyper { lr: 10.0 };
        assert_eq!(
            sgd_step(&mut state, &w, &g, &hyper),
            Err(StepError::NonFiniteStep { index: 0 })
        );
    }
}
