use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sarsim::control::ControllerKind;
use sarsim::error::SimError;
use sarsim::sim::{run_batch, run_scenario_with, write_batch_outputs, write_run_outputs, RunOptions, ScenarioConfig};

#[derive(Parser)]
#[command(name = "sarsim", version, about = "Multi-robot search-and-rescue grid simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSVs and JSON record.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's controller.
        #[arg(long)]
        controller: Option<ControllerKind>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Record zero decision time so output is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run controllers over a seed range and write summary CSVs.
    Batch {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated controller names.
        #[arg(long, value_delimiter = ',', default_value = "cooperative,selfish,pure_mpc,acs,exhaustive")]
        controllers: Vec<ControllerKind>,
        /// Inclusive range such as `1..20`, or a single seed.
        #[arg(long, value_parser = parse_seeds, default_value = "1..20")]
        seeds: RangeInclusive<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        no_timing: bool,
    },
    /// Check a scenario file and exit.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, String> {
    let bad = |_| format!("`{s}` is not a seed or an `a..b` range");
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
            if a > b {
                return Err(format!("empty seed range `{s}`"));
            }
            Ok(a..=b)
        }
        None => {
            let n = s.trim().parse().map_err(bad)?;
            Ok(n..=n)
        }
    }
}

fn execute(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Validate { scenario } => {
            let cfg = ScenarioConfig::load(&scenario)?;
            println!("{}: ok ({}x{}, {} robots, {} steps)", scenario.display(), cfg.grid.width, cfg.grid.height, cfg.robots.len(), cfg.steps);
        }
        Command::Run { scenario, controller, seed, steps, out, no_timing } => {
            let mut cfg = ScenarioConfig::load(&scenario)?;
            cfg.controller = controller.unwrap_or(cfg.controller);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.steps = steps.unwrap_or(cfg.steps);
            let record = run_scenario_with(&cfg, RunOptions { timing: !no_timing })?;
            let stem = format!("{}_{}_{}", cfg.name, cfg.controller, cfg.seed);
            write_run_outputs(&record, &out, &stem)?;
            let last = record.ticks.last().expect("tick 0 recorded");
            println!(
                "{stem}: coverage {:.2}%, found {}, deceased {} -> {}",
                last.coverage_pct,
                last.victims_found,
                last.victims_deceased,
                out.display()
            );
        }
        Command::Batch { scenario, controllers, seeds, steps, out, no_timing } => {
            let mut cfg = ScenarioConfig::load(&scenario)?;
            cfg.steps = steps.unwrap_or(cfg.steps);
            let batch = run_batch(&cfg, &controllers, seeds, RunOptions { timing: !no_timing })?;
            write_batch_outputs(&batch, &out)?;
            for a in &batch.aggregates {
                println!(
                    "{:<12} coverage {:6.2}%  found {:5.2}  deceased {:5.2}  conflicts {:7.1}  evals/tick {:8.1}",
                    a.controller.name(),
                    a.final_coverage_mean,
                    a.victims_found_mean,
                    a.victims_deceased_mean,
                    a.conflicts_mean,
                    a.objective_evals_mean
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ SimError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
