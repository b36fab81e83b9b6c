//! Objective-evaluation contract: every objective yields a nonnegative
//! energy and its gradient, packaged with cached norms.

use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    /// The energy model assumes E >= 0 everywhere; a negative or non-finite
    /// value means the objective is outside the supported class.
    #[error("objective produced energy {value}, expected a finite value >= 0")]
    NonFiniteEnergy { value: f64 },
    #[error("objective produced a non-finite gradient entry at index {index}")]
    NonFiniteGradient { index: usize },
    #[error("dimension mismatch: objective expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One evaluation of an objective: energy, gradient, and cached norms.
///
/// `grad_norm_sq` is the plain sum of squares (it may overflow to infinity
/// for gradient entries near 1e300); `grad_norm` is always finite for finite
/// gradients. The two agree to within a few ulps whenever both are finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradEval {
    pub energy: f64,
    pub gradient: ParamVector,
    pub grad_norm: f64,
    pub grad_norm_sq: f64,
}

impl GradEval {
    pub fn new(energy: f64, gradient: ParamVector) -> Result<Self, EvalError> {
        if !energy.is_finite() || energy < 0.0 {
            return Err(EvalError::NonFiniteEnergy { value: energy });
        }
        if let Some(index) = gradient.first_non_finite() {
            return Err(EvalError::NonFiniteGradient { index });
        }
        let grad_norm_sq = gradient.norm_sq();
        let grad_norm = if grad_norm_sq.is_finite() {
            grad_norm_sq.sqrt()
        } else {
            gradient.norm()
        };
        Ok(GradEval {
            energy,
            gradient,
            grad_norm,
            grad_norm_sq,
        })
    }
}

/// An optimization target with an analytic gradient.
pub trait Objective {
    fn dim(&self) -> usize;

    /// Full evaluation at `w`. Implementations construct the result through
    /// [`GradEval::new`], which enforces E >= 0 and finiteness.
    fn eval(&self, w: &ParamVector) -> Result<GradEval, EvalError>;

    /// Evaluation restricted to a subset of samples, for mini-batch runs.
    /// Objectives without sample structure ignore the subset.
    fn eval_batch(&self, w: &ParamVector, _indices: &[usize]) -> Result<GradEval, EvalError> {
        self.eval(w)
    }

    /// Number of samples, when the objective is an average over data.
    fn sample_count(&self) -> Option<usize> {
        None
    }

    /// Deterministic starting point for a run with the given seed.
    fn initial_point(&self, seed: u64) -> ParamVector;
}

/// Evaluate with a dimension check up front.
pub fn evaluate(objective: &dyn Objective, w: &ParamVector) -> Result<GradEval, EvalError> {
    if w.dim() != objective.dim() {
        return Err(EvalError::DimensionMismatch {
            expected: objective.dim(),
            got: w.dim(),
        });
    }
    objective.eval(w)
}
