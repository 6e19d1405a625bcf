use serde::{Deserialize, Serialize};

use crate::control::ControllerKind;
use crate::sensing::ScanCertaintyMap;
use crate::world::VictimId;

use super::engine::RunRecord;

/// Coverage levels reported as rise times, in percent.
pub const RISE_THRESHOLDS: [f64; 5] = [50.0, 70.0, 80.0, 85.0, 90.0];

/// Total scan certainty `S` and the coverage percentage it represents.
pub fn total_scan_certainty(map: &ScanCertaintyMap) -> (f64, f64) {
    (map.total(), map.coverage_pct())
}

/// First tick whose coverage reaches `threshold` percent.
pub fn rise_time(series: &[f64], threshold: f64) -> Option<usize> {
    series.iter().position(|&c| c >= threshold)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VictimSummary {
    pub victim_id: VictimId,
    pub detect_tick: Option<usize>,
    pub health_at_detect: Option<f64>,
    pub final_health: f64,
    pub visits: usize,
}

pub fn victim_summary(record: &RunRecord) -> Vec<VictimSummary> {
    record
        .victims
        .iter()
        .map(|v| VictimSummary {
            victim_id: v.id,
            detect_tick: v.detection.map(|d| d.tick),
            health_at_detect: v.detection.map(|d| d.health),
            final_health: v.final_health,
            visits: v.visits,
        })
        .collect()
}

/// One run reduced to its headline numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub controller: ControllerKind,
    pub seed: u64,
    pub steps: usize,
    pub final_coverage_pct: f64,
    /// Rise times for [`RISE_THRESHOLDS`].
    pub rise_times: [Option<usize>; 5],
    pub victims_found: usize,
    pub victims_deceased: usize,
    pub conflicts: usize,
    pub supervisor_calls: usize,
    pub mean_decision_ms: f64,
    pub mean_objective_evals: f64,
}

impl SummaryRow {
    pub fn from_record(record: &RunRecord) -> Self {
        let coverage: Vec<f64> = record.ticks.iter().map(|t| t.coverage_pct).collect();
        let last = record.ticks.last().expect("tick 0 is always recorded");
        // tick 0 makes no decision
        let decided = &record.ticks[1..];
        let mean = |f: &dyn Fn(&super::engine::TickMetrics) -> f64| {
            if decided.is_empty() {
                0.0
            } else {
                decided.iter().map(f).sum::<f64>() / decided.len() as f64
            }
        };
        SummaryRow {
            scenario: record.scenario.clone(),
            controller: record.controller,
            seed: record.seed,
            steps: record.steps,
            final_coverage_pct: last.coverage_pct,
            rise_times: RISE_THRESHOLDS.map(|t| rise_time(&coverage, t)),
            victims_found: last.victims_found,
            victims_deceased: last.victims_deceased,
            conflicts: record.ticks.iter().map(|t| t.conflicts).sum(),
            supervisor_calls: record.ticks.iter().map(|t| t.supervisor_calls).sum(),
            mean_decision_ms: mean(&|t| t.decision_ms),
            mean_objective_evals: mean(&|t| t.objective_evals as f64),
        }
    }

    /// Rise time to `RISE_THRESHOLDS[i]`, counting a miss as `steps + 1`.
    pub fn censored_rise(&self, i: usize) -> usize {
        self.rise_times[i].unwrap_or(self.steps + 1)
    }
}

/// Arithmetic mean and population variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}
