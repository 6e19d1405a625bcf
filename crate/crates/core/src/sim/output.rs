//! CSV and JSON writers.

use std::io::Write;
use std::path::Path as FsPath;

use crate::error::SimError;

use super::batch::BatchResult;
use super::engine::RunRecord;
use super::metrics::{victim_summary, RISE_THRESHOLDS};

pub const RUN_COLUMNS: [&str; 7] =
    ["tick", "coverage_pct", "victims_found", "victims_deceased", "conflicts", "decision_ms", "objective_evals"];

pub const VICTIM_COLUMNS: [&str; 4] = ["victim_id", "detect_tick", "health_at_detect", "visits"];

const DASH: &str = "-";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| DASH.to_string(), |v| v.to_string())
}

pub fn write_run_csv(record: &RunRecord, out: impl Write) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_COLUMNS)?;
    for t in &record.ticks {
        w.write_record([
            t.tick.to_string(),
            t.coverage_pct.to_string(),
            t.victims_found.to_string(),
            t.victims_deceased.to_string(),
            t.conflicts.to_string(),
            t.decision_ms.to_string(),
            t.objective_evals.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Undetected victims get `-` for tick and health.
pub fn write_victim_csv(record: &RunRecord, out: impl Write) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VICTIM_COLUMNS)?;
    for v in victim_summary(record) {
        w.write_record([v.victim_id.to_string(), opt(v.detect_tick), opt(v.health_at_detect), v.visits.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn rise_headers(prefix: &str) -> Vec<String> {
    RISE_THRESHOLDS.iter().map(|t| format!("{prefix}{t}")).collect()
}

pub fn write_batch_csv(batch: &BatchResult, out: impl Write) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> =
        ["scenario", "controller", "seed", "steps", "final_coverage_pct"].map(String::from).to_vec();
    header.extend(rise_headers("rise_"));
    header.extend(
        ["victims_found", "victims_deceased", "conflicts", "supervisor_calls", "mean_decision_ms", "mean_objective_evals"]
            .map(String::from),
    );
    w.write_record(&header)?;
    for r in &batch.rows {
        let mut row = vec![
            r.scenario.clone(),
            r.controller.to_string(),
            r.seed.to_string(),
            r.steps.to_string(),
            r.final_coverage_pct.to_string(),
        ];
        row.extend(r.rise_times.iter().map(|t| opt(*t)));
        row.extend([
            r.victims_found.to_string(),
            r.victims_deceased.to_string(),
            r.conflicts.to_string(),
            r.supervisor_calls.to_string(),
            r.mean_decision_ms.to_string(),
            r.mean_objective_evals.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv(batch: &BatchResult, out: impl Write) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["controller", "runs", "final_coverage_mean", "final_coverage_var"].map(String::from).to_vec();
    header.extend(rise_headers("rise_mean_"));
    header.extend(rise_headers("rise_reached_"));
    header.extend(
        [
            "victims_found_mean",
            "victims_found_var",
            "victims_deceased_mean",
            "victims_deceased_var",
            "conflicts_mean",
            "decision_ms_mean",
            "objective_evals_mean",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for a in &batch.aggregates {
        let mut row = vec![
            a.controller.to_string(),
            a.runs.to_string(),
            a.final_coverage_mean.to_string(),
            a.final_coverage_var.to_string(),
        ];
        row.extend(a.rise_time_mean.iter().map(f64::to_string));
        row.extend(a.rise_reached.iter().map(usize::to_string));
        row.extend(
            [
                a.victims_found_mean,
                a.victims_found_var,
                a.victims_deceased_mean,
                a.victims_deceased_var,
                a.conflicts_mean,
                a.decision_ms_mean,
                a.objective_evals_mean,
            ]
            .map(|v| v.to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>.csv`, `<stem>_victims.csv` and `<stem>.json` into `dir`.
pub fn write_run_outputs(record: &RunRecord, dir: &FsPath, stem: &str) -> Result<(), SimError> {
    std::fs::create_dir_all(dir)?;
    write_run_csv(record, std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
    write_victim_csv(record, std::fs::File::create(dir.join(format!("{stem}_victims.csv")))?)?;
    std::fs::write(dir.join(format!("{stem}.json")), record.to_json())?;
    Ok(())
}

/// Writes `summary.csv` and `aggregate.csv` into `dir`.
pub fn write_batch_outputs(batch: &BatchResult, dir: &FsPath) -> Result<(), SimError> {
    std::fs::create_dir_all(dir)?;
    write_batch_csv(batch, std::fs::File::create(dir.join("summary.csv"))?)?;
    write_aggregate_csv(batch, std::fs::File::create(dir.join("aggregate.csv"))?)?;
    Ok(())
}
