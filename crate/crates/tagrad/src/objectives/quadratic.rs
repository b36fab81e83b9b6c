//! Axis-aligned convex quadratics E(w) = sum_i a_i * w_i^2: the simplest
//! testbed with a known global minimum at the origin.

use crate::eval::{EvalError, GradEval, Objective};
use crate::objectives::{AnalyticInfo, AnalyticObjective, Minimum};
use crate::vector::ParamVector;

pub struct Quadratic {
    coeffs: Vec<f64>,
    start: Vec<f64>,
}

impl Quadratic {
    /// Requires every curvature coefficient positive.
    pub fn new(coeffs: Vec<f64>, start: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), start.len());
        assert!(coeffs.iter().all(|&a| a > 0.0));
        Quadratic { coeffs, start }
    }

    /// E(w) = a * w^2 started from w0.
    pub fn one_d(a: f64, w0: f64) -> Self {
        Quadratic::new(vec![a], vec![w0])
    }

    /// Largest curvature 2*a_i, the Lipschitz constant of the gradient.
    pub fn curvature(&self) -> f64 {
        2.0 * self.coeffs.iter().fold(0.0f64, |m, &a| m.max(a))
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn eval(&self, w: &ParamVector) -> Result<GradEval, EvalError> {
        let mut e = 0.0;
        let mut g = Vec::with_capacity(self.dim());
        for (i, &a) in self.coeffs.iter().enumerate() {
            e += a * w[i] * w[i];
            g.push(2.0 * a * w[i]);
        }
        GradEval::new(e, ParamVector::new(g))
    }

    /// The start is part of the objective definition; seeds do not move it.
    fn initial_point(&self, _seed: u64) -> ParamVector {
        ParamVector::new(self.start.clone())
    }
}

impl AnalyticObjective for Quadratic {
    fn info(&self) -> AnalyticInfo {
        AnalyticInfo {
            name: "quadratic",
            dim: self.dim(),
            global_min: Minimum {
                w: ParamVector::zeros(self.dim()),
                energy: 0.0,
            },
            global_multiplicity: 2,
            local_minima: Vec::new(),
        }
    }
}
