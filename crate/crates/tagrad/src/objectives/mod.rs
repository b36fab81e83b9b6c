//! Testbed objectives with analytic gradients: convex quadratics, the
//! engineered two-well escape testbed, and the MLP function-approximation
//! task with its dataset.

pub mod dataset;
pub mod mlp;
pub mod quadratic;
pub mod two_well;

pub use dataset::{gen_dataset, target, Dataset, DatasetError, DEFAULT_DATA_SEED, DEFAULT_SAMPLES};
pub use mlp::{mlp_loss_grad, mlp_loss_grad_batch, MlpParams, MlpSine, PARAM_COUNT};
pub use quadratic::Quadratic;
pub use two_well::{two_well, TwoWell};

use crate::eval::Objective;
use crate::vector::ParamVector;

/// A known stationary minimum of an analytic objective.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub w: ParamVector,
    pub energy: f64,
}

/// Ground-truth structure of an analytic objective, registered at build
/// time and re-verified by the test suite (gradient norm <= 1e-10 and a
/// positive second difference at every listed minimum).
#[derive(Clone, Debug)]
pub struct AnalyticInfo {
    pub name: &'static str,
    pub dim: usize,
    pub global_min: Minimum,
    /// Order 2m of the leading term at the global minimum; governs the
    /// strength of the gradient-vanishing singularity the adaptive rates
    /// divide by.
    pub global_multiplicity: u32,
    /// Non-global minima with energy > 0, the jump-escape targets.
    pub local_minima: Vec<Minimum>,
}

/// Objectives whose minima are known in closed form.
pub trait AnalyticObjective: Objective {
    fn info(&self) -> AnalyticInfo;
}

/// The canonical instances the invariant suite checks.
pub fn analytic_registry() -> Vec<Box<dyn AnalyticObjective>> {
    vec![
        Box::new(Quadratic::one_d(1.0, 1.0)),
        Box::new(Quadratic::new(vec![0.5, 2.0], vec![1.0, -1.0])),
        Box::new(TwoWell::new()),
    ]
}
