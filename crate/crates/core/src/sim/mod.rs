//! Scenarios, the simulation loop, metrics and batch execution.

mod batch;
mod config;
mod engine;
mod metrics;
mod output;

pub use batch::{run_batch, AggregateRow, BatchResult};
pub use config::{
    CertaintyConfig, GridConfig, HealthConfig, Layout, OptimizerConfig, PlanningConfig, Rect, Region, RobotConfig,
    ScenarioConfig, VictimConfig, VictimSpec,
};
pub use engine::{
    run_scenario, run_scenario_with, FinalMaps, RunOptions, RunRecord, Simulation, SupervisorCall, TickMetrics, VictimRecord,
};
pub use metrics::{mean_variance, rise_time, total_scan_certainty, victim_summary, SummaryRow, VictimSummary, RISE_THRESHOLDS};
pub use output::{
    write_aggregate_csv, write_batch_csv, write_batch_outputs, write_run_csv, write_run_outputs, write_victim_csv,
    RUN_COLUMNS, VICTIM_COLUMNS,
};
