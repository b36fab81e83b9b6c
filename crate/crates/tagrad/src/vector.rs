//! Flat parameter vectors with the small amount of arithmetic the
//! optimization loop needs.

use serde::{Deserialize, Serialize};
use std::ops::Index;
use thiserror::Error;

/// Raised when an optimizer update would write NaN/Inf into the weights;
/// the run loop turns it into a Diverged outcome.
#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("update produced a non-finite value at coordinate {index}")]
    NonFiniteStep { index: usize },
}

/// Ordered sequence of 64-bit weights. The dimension is fixed for the
/// lifetime of a run; every accepted operation keeps all entries finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParamVector(values)
    }

    pub fn zeros(dim: usize) -> Self {
        ParamVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_finite())
    }

    /// Sum of squared entries. May overflow to infinity for entries near
    /// 1e300; callers that need the norm of such vectors use [`Self::norm`].
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// Euclidean norm. Falls back to a scaled accumulation when the plain
    /// sum of squares overflows, so `[1e300]` has norm 1e300, not infinity.
    pub fn norm(&self) -> f64 {
        let s = self.norm_sq();
        if s.is_finite() {
            return s.sqrt();
        }
        let m = self.0.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        m * self.0.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
    }

    /// `self - c * dir`, the Euler update.
    pub fn sub_scaled(&self, c: f64, dir: &ParamVector) -> ParamVector {
        debug_assert_eq!(self.dim(), dir.dim());
        ParamVector(
            self.0
                .iter()
                .zip(dir.0.iter())
                .map(|(w, d)| w - c * d)
                .collect(),
        )
    }

    /// Euclidean distance to another vector of the same dimension.
    pub fn distance(&self, other: &ParamVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        ParamVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_matches_hand_value() {
        let v = ParamVector::new(vec![3.0, 4.0]);
        assert_eq!(v.norm_sq(), 25.0);
        assert_eq!(v.norm(), 5.0);
    }

    #[test]
    fn norm_survives_huge_entries() {
        let v = ParamVector::new(vec![1e300]);
        assert_eq!(v.norm(), 1e300);
        assert!(v.norm_sq().is_infinite());
    }

    #[test]
    fn sub_scaled_is_euler_update() {
        let w = ParamVector::new(vec![2.0, -1.0]);
        let g = ParamVector::new(vec![4.0, 2.0]);
        let w2 = w.sub_scaled(0.5, &g);
        assert_eq!(w2.as_slice(), &[0.0, -2.0]);
    }

    #[test]
    fn finiteness_checks() {
        assert!(ParamVector::new(vec![0.0, 1e308]).is_finite());
        let bad = ParamVector::new(vec![1.0, f64::NAN]);
        assert!(!bad.is_finite());
        assert_eq!(bad.first_non_finite(), Some(1));
    }
}
