//! Multi-seed campaign execution and per-method aggregation.
//!
//! Runs execute on the rayon pool but results are collected in seed order,
//! so aggregates (and therefore emitted artifacts) never depend on
//! scheduling.

use crate::eval::Objective;
use crate::integrator::{run_method, Method, OptConfig, Outcome, RunRecord};
use rayon::prelude::*;

/// Per-iteration statistics across the seeds of one method, padded to a
/// common length: a run that stopped early holds its final recorded energy
/// through the remaining iterations.
#[derive(Clone, Debug, Default)]
pub struct AggregateCurve {
    pub mean_e: Vec<f64>,
    pub min_e: Vec<f64>,
    pub max_e: Vec<f64>,
    /// Cumulative fraction of seeds whose energy had reached stop_energy by
    /// each iteration.
    pub frac_converged: Vec<f64>,
    pub frac_converged_final: f64,
    /// Median of per-seed convergence iterations, with non-converged seeds
    /// counted as max_iters + 1 so they push the median out instead of
    /// dropping silently.
    pub median_converge_iter: f64,
    pub mean_wall_clock: f64,
}

impl AggregateCurve {
    pub fn len(&self) -> usize {
        self.mean_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_e.is_empty()
    }

    /// Aggregates seed-ordered records. `max_iters` fixes the padded length
    /// (max_iters + 1 rows); `stop_energy` defines convergence.
    pub fn from_records(records: &[RunRecord], max_iters: u32, stop_energy: f64) -> Self {
        if records.is_empty() {
            return AggregateCurve::default();
        }
        let rows = max_iters as usize + 1;
        let contributing: Vec<&RunRecord> =
            records.iter().filter(|r| !r.points.is_empty()).collect();

        let mut curve = AggregateCurve::default();
        if !contributing.is_empty() {
            for t in 0..rows {
                let mut sum = 0.0;
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for r in &contributing {
                    let e = r
                        .points
                        .get(t)
                        .unwrap_or_else(|| r.points.last().expect("nonempty"))
                        .energy;
                    sum += e;
                    min = min.min(e);
                    max = max.max(e);
                }
                curve.mean_e.push(sum / contributing.len() as f64);
                curve.min_e.push(min);
                curve.max_e.push(max);
            }
        }

        let sentinel = max_iters as u64 + 1;
        let mut converge_iters: Vec<u64> = records
            .iter()
            .map(|r| r.converge_iter(stop_energy).map_or(sentinel, u64::from))
            .collect();
        converge_iters.sort_unstable();
        curve.frac_converged = (0..rows as u64)
            .map(|t| {
                let done = converge_iters.iter().filter(|&&c| c <= t).count();
                done as f64 / records.len() as f64
            })
            .collect();
        curve.frac_converged_final = *curve.frac_converged.last().unwrap_or(&0.0);
        curve.median_converge_iter = median(&converge_iters);
        curve.mean_wall_clock =
            records.iter().map(|r| r.wall_clock_total).sum::<f64>() / records.len() as f64;
        curve
    }
}

fn median(sorted: &[u64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

pub struct MethodResult {
    pub label: String,
    pub method: Method,
    /// One record per seed, in seed order.
    pub records: Vec<RunRecord>,
    pub curve: AggregateCurve,
}

impl MethodResult {
    /// True when every seed diverged; drives the harness exit code.
    pub fn all_diverged(&self) -> bool {
        self.records
            .iter()
            .all(|r| matches!(r.outcome, Outcome::Diverged(_)))
    }
}

pub struct CampaignResult {
    pub methods: Vec<MethodResult>,
}

impl CampaignResult {
    pub fn any_method_all_diverged(&self) -> bool {
        self.methods.iter().any(MethodResult::all_diverged)
    }
}

/// Runs every method over seeds 0..n_seeds. The base config's own seed
/// field is ignored.
pub fn run_campaign(
    objective: &(dyn Objective + Sync),
    methods: &[(String, Method)],
    base: &OptConfig,
    n_seeds: u32,
) -> CampaignResult {
    let seeds: Vec<u64> = (0..n_seeds as u64).collect();
    run_campaign_with_seeds(objective, methods, base, &seeds)
}

/// Campaign over an explicit seed list (tests use repeated seeds to pin
/// degenerate aggregates).
pub fn run_campaign_with_seeds(
    objective: &(dyn Objective + Sync),
    methods: &[(String, Method)],
    base: &OptConfig,
    seeds: &[u64],
) -> CampaignResult {
    let methods = methods
        .iter()
        .map(|(label, method)| {
            let records: Vec<RunRecord> = seeds
                .par_iter()
                .map(|&seed| run_method(objective, method, &base.with_seed(seed)))
                .collect();
            let curve = AggregateCurve::from_records(&records, base.max_iters, base.stop_energy);
            MethodResult {
                label: label.clone(),
                method: *method,
                records,
                curve,
            }
        })
        .collect();
    CampaignResult { methods }
}
