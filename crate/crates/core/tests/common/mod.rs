#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use sarsim::control::ControllerKind;
use sarsim::sim::{RobotConfig, ScenarioConfig};
use sarsim::world::Cell;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

pub fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(scenario_path(name)).expect("bundled scenario loads")
}

pub fn with_controller(cfg: &ScenarioConfig, controller: ControllerKind) -> ScenarioConfig {
    ScenarioConfig { controller, ..cfg.clone() }
}

pub const ALL_CONTROLLERS: [ControllerKind; 5] = [
    ControllerKind::Cooperative,
    ControllerKind::Selfish,
    ControllerKind::PureMpc,
    ControllerKind::Acs,
    ControllerKind::Exhaustive,
];

const BASE: &str = "name = \"prop\"\nsteps = 1\n[grid]\nwidth = 4\nheight = 4\n[[robots]]\nstart = [1, 1]\nradius = 2.0\neta = 0.5\n";

/// Small seeded worlds: a handful of ticks on grids up to 10x10.
pub fn small_scenario(controllers: &'static [ControllerKind]) -> impl Strategy<Value = ScenarioConfig> {
    (
        4usize..=10,
        4usize..=10,
        0.0f64..0.25,
        0usize..=4,
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 1.0f64..5.0, 0.05f64..1.0), 1..=3),
        any::<u64>(),
        prop::sample::select(controllers),
        0.0f64..0.9,
        1usize..=6,
    )
        .prop_map(|(w, h, density, victims, robots, seed, controller, initial, steps)| {
            let mut cfg = ScenarioConfig::from_toml_str(BASE).expect("base config is valid");
            cfg.grid.width = w;
            cfg.grid.height = h;
            cfg.grid.obstacle_density = density;
            cfg.victims.count = victims;
            cfg.seed = seed;
            cfg.steps = steps;
            cfg.controller = controller;
            cfg.certainty.initial = initial;
            cfg.optimizer.max_evaluations = 150;
            cfg.robots = robots
                .into_iter()
                .map(|(fx, fy, radius, eta)| RobotConfig {
                    start: Cell::new(1 + (fx * w as f64) as i32, 1 + (fy * h as f64) as i32),
                    radius,
                    eta,
                })
                .collect();
            cfg
        })
}
