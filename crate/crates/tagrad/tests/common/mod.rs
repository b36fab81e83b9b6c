//! Shared oracle helpers for the integration tests: finite-difference
//! gradients and a dense-scan minimum finder, both independent of the
//! analytic derivatives they are used to check.
#![allow(dead_code)]

use tagrad::eval::Objective;
use tagrad::vector::ParamVector;

/// Central finite-difference gradient of `objective` at `w`.
pub fn central_fd_gradient(objective: &dyn Objective, w: &ParamVector, h: f64) -> ParamVector {
    let base = w.as_slice();
    let mut out = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let mut plus = base.to_vec();
        let mut minus = base.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let ep = objective.eval(&ParamVector::new(plus)).unwrap().energy;
        let em = objective.eval(&ParamVector::new(minus)).unwrap().energy;
        out.push((ep - em) / (2.0 * h));
    }
    ParamVector::new(out)
}

/// Vector-norm relative error of `approx` against `exact`, floored so a
/// zero reference cannot divide out.
pub fn vector_rel_err(approx: &ParamVector, exact: &ParamVector) -> f64 {
    approx.distance(exact) / exact.norm().max(1e-12)
}

#[derive(Clone, Copy, Debug)]
pub struct ScanMinimum {
    pub w: f64,
    pub energy: f64,
}

/// Locate every strict local minimum of `f` on [lo, hi] by dense scanning,
/// then refine each bracket by ternary search. Uses function values only,
/// so it is independent of any analytic gradient.
pub fn scan_minima<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<ScanMinimum> {
    assert!(n >= 3 && hi > lo);
    let step = (hi - lo) / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| f(lo + i as f64 * step)).collect();
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            let mut a = lo + (i - 1) as f64 * step;
            let mut b = lo + (i + 1) as f64 * step;
            for _ in 0..200 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if f(m1) <= f(m2) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let w = 0.5 * (a + b);
            out.push(ScanMinimum { w, energy: f(w) });
        }
    }
    out
}

/// Median of an unordered sample (mean of the middle pair for even sizes).
pub fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
