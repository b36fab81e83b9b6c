//! A 1-D double-well testbed for jump behavior near non-global minima:
//!
//! ```text
//! E(w) = (w - 1)^4 * (0.05 * (w + 1)^2 + 0.002)
//! ```
//!
//! The product form puts a true multiplicity-4 global minimum at w = 1
//! (E and its first three derivatives vanish there) and, because the
//! second factor stays positive, E > 0 everywhere else. The cubic factor
//! of E' leaves two more critical points, the roots of
//! 0.3 w^2 + 0.4 w + 0.108: a shallow local minimum near w = -0.957 and
//! the barrier top near w = -0.376. Their exact positions come from the
//! quadratic formula and are registered as ground truth; a dense-scan
//! oracle double-checks them in the integration tests.
//!
//! Near the shallow minimum the gradient vanishes while E stays above
//! 0.03, which is exactly the regime where the unbounded rate rules
//! produce basin-escaping jumps and the placid rules stay put.

use crate::eval::{EvalError, GradEval, Objective};
use crate::objectives::{AnalyticInfo, AnalyticObjective, Minimum};
use crate::vector::ParamVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// (E, dE/dw) at a scalar point.
pub fn two_well(w: f64) -> (f64, f64) {
    let d = w - 1.0;
    let s = w + 1.0;
    let g = 0.05 * s * s + 0.002;
    let gp = 0.1 * s;
    let d2 = d * d;
    let e = d2 * d2 * g;
    let de = d * d2 * (4.0 * g + d * gp);
    (e, de)
}

pub struct TwoWell;

impl TwoWell {
    pub fn new() -> Self {
        TwoWell
    }

    /// Location of the shallow local minimum: the smaller root of
    /// 0.3 w^2 + 0.4 w + 0.108.
    pub fn shallow_min() -> f64 {
        (-0.4 - 0.0304f64.sqrt()) / 0.6
    }

    /// Barrier top between the wells: the larger root of the same quadratic.
    pub fn barrier() -> f64 {
        (-0.4 + 0.0304f64.sqrt()) / 0.6
    }

    /// Distance from the shallow minimum to the barrier top. A step longer
    /// than a few of these cannot be mistaken for ordinary descent.
    pub fn basin_width() -> f64 {
        Self::barrier() - Self::shallow_min()
    }

    /// Energy at the shallow minimum (about 0.0307).
    pub fn shallow_energy() -> f64 {
        two_well(Self::shallow_min()).0
    }
}

impl Default for TwoWell {
    fn default() -> Self {
        TwoWell::new()
    }
}

impl Objective for TwoWell {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, w: &ParamVector) -> Result<GradEval, EvalError> {
        let (e, de) = two_well(w[0]);
        GradEval::new(e, ParamVector::new(vec![de]))
    }

    /// Starts just left of the shallow minimum: w_s - U(0.005, 0.05).
    /// Starting on the outer flank keeps the first jump pointed across the
    /// basin rather than away from it.
    fn initial_point(&self, seed: u64) -> ParamVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = rng.random_range(0.005..0.05);
        ParamVector::new(vec![Self::shallow_min() - offset])
    }
}

impl AnalyticObjective for TwoWell {
    fn info(&self) -> AnalyticInfo {
        AnalyticInfo {
            name: "two_well",
            dim: 1,
            global_min: Minimum {
                w: ParamVector::new(vec![1.0]),
                energy: 0.0,
            },
            global_multiplicity: 4,
            local_minima: vec![Minimum {
                w: ParamVector::new(vec![Self::shallow_min()]),
                energy: Self::shallow_energy(),
            }],
        }
    }
}
