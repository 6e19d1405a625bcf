use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::ControllerKind;
use crate::error::SimError;

use super::config::ScenarioConfig;
use super::engine::{run_scenario_with, RunOptions};
use super::metrics::{mean_variance, SummaryRow, RISE_THRESHOLDS};

/// Mean and variance of a controller's runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub controller: ControllerKind,
    pub runs: usize,
    pub final_coverage_mean: f64,
    pub final_coverage_var: f64,
    /// Mean rise time per threshold, misses counted as `steps + 1`.
    pub rise_time_mean: [f64; 5],
    /// Runs that reached each threshold.
    pub rise_reached: [usize; 5],
    pub victims_found_mean: f64,
    pub victims_found_var: f64,
    pub victims_deceased_mean: f64,
    pub victims_deceased_var: f64,
    pub conflicts_mean: f64,
    pub decision_ms_mean: f64,
    pub objective_evals_mean: f64,
}

impl AggregateRow {
    pub fn from_rows(controller: ControllerKind, rows: &[&SummaryRow]) -> Self {
        let col = |f: &dyn Fn(&SummaryRow) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<f64>>();
        let (final_coverage_mean, final_coverage_var) = mean_variance(&col(&|r| r.final_coverage_pct));
        let (victims_found_mean, victims_found_var) = mean_variance(&col(&|r| r.victims_found as f64));
        let (victims_deceased_mean, victims_deceased_var) = mean_variance(&col(&|r| r.victims_deceased as f64));
        let mut rise_time_mean = [0.0; 5];
        let mut rise_reached = [0; 5];
        for i in 0..RISE_THRESHOLDS.len() {
            rise_time_mean[i] = mean_variance(&col(&|r| r.censored_rise(i) as f64)).0;
            rise_reached[i] = rows.iter().filter(|r| r.rise_times[i].is_some()).count();
        }
        AggregateRow {
            controller,
            runs: rows.len(),
            final_coverage_mean,
            final_coverage_var,
            rise_time_mean,
            rise_reached,
            victims_found_mean,
            victims_found_var,
            victims_deceased_mean,
            victims_deceased_var,
            conflicts_mean: mean_variance(&col(&|r| r.conflicts as f64)).0,
            decision_ms_mean: mean_variance(&col(&|r| r.mean_decision_ms)).0,
            objective_evals_mean: mean_variance(&col(&|r| r.mean_objective_evals)).0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    /// Controller-major, then seed order.
    pub rows: Vec<SummaryRow>,
    /// One per controller, in the order requested.
    pub aggregates: Vec<AggregateRow>,
}

impl BatchResult {
    pub fn aggregate(&self, kind: ControllerKind) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.controller == kind)
    }
}

/// Runs every controller on every seed in parallel. Rows come back in a
/// fixed order whatever the scheduling.
pub fn run_batch(
    base: &ScenarioConfig,
    controllers: &[ControllerKind],
    seeds: RangeInclusive<u64>,
    options: RunOptions,
) -> Result<BatchResult, SimError> {
    base.validate()?;
    let jobs: Vec<ScenarioConfig> = controllers
        .iter()
        .flat_map(|&controller| {
            seeds.clone().map(move |seed| ScenarioConfig { controller, seed, ..base.clone() })
        })
        .collect();
    let rows = jobs
        .par_iter()
        .map(|cfg| run_scenario_with(cfg, options).map(|r| SummaryRow::from_record(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = controllers
        .iter()
        .map(|&k| {
            let mine: Vec<&SummaryRow> = rows.iter().filter(|r| r.controller == k).collect();
            AggregateRow::from_rows(k, &mine)
        })
        .collect();
    Ok(BatchResult { rows, aggregates })
}
