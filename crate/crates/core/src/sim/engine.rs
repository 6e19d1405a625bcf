//! The tick loop.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::control::{detect_conflicts, make_controller, ConflictEvent, ControlParams, Controller, ControllerKind, WorldView};
use crate::error::SimError;
use crate::fuzzy::RuleBase;
use crate::pathplan::Path;
use crate::sensing::{
    merge_into_global, perception_field, prune_local_victim_map, update_scan_certainty, GlobalMaps, GlobalVictimMap,
    LocalVictimMap, RobotState, ScanCertaintyMap, VictimObservation,
};
use crate::world::{step_health, step_victim_motion, Cell, DetectionRecord, GridEnvironment, HealthParams, OccupancyMap, RngStream, StreamKind, Victim, VictimId};

use super::config::ScenarioConfig;

/// Run-time switches that do not change the simulated world.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Record decision wall time. Off makes records byte-reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timing: true }
    }
}

/// Metrics sampled at the end of a tick. Tick 0 is the initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickMetrics {
    pub tick: usize,
    pub coverage_pct: f64,
    pub victims_found: usize,
    pub victims_deceased: usize,
    pub conflicts: usize,
    pub supervisor_calls: usize,
    pub decision_ms: f64,
    pub objective_evals: usize,
}

/// Objective before and after one supervisor invocation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupervisorCall {
    pub tick: usize,
    pub warm_value: f64,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VictimRecord {
    pub id: VictimId,
    pub initial_position: Cell,
    pub initial_health: f64,
    pub final_position: Cell,
    pub final_health: f64,
    pub alive: bool,
    pub detection: Option<DetectionRecord>,
    pub visits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalMaps {
    /// Global scan certainty, row by row from `y = 1`.
    pub scan_certainty: Vec<Vec<f64>>,
    /// Known obstacles (1) by row.
    pub occupancy: Vec<Vec<u8>>,
    pub robot_scan_certainty: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub controller: ControllerKind,
    pub seed: u64,
    pub steps: usize,
    pub config: ScenarioConfig,
    pub obstacles: Vec<Cell>,
    pub ticks: Vec<TickMetrics>,
    pub victims: Vec<VictimRecord>,
    pub conflict_events: Vec<ConflictEvent>,
    pub supervisor_log: Vec<SupervisorCall>,
    /// Robot positions per tick, including the start.
    pub trajectories: Vec<Vec<Cell>>,
    pub final_maps: FinalMaps,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialises")
    }
}

/// A running simulation. [`run_scenario`] drives it to the end.
pub struct Simulation {
    config: ScenarioConfig,
    options: RunOptions,
    env: GridEnvironment,
    health: HealthParams,
    params: ControlParams,
    rules: RuleBase,
    controller: Box<dyn Controller>,
    occupancy: OccupancyMap,
    robots: Vec<RobotState>,
    local_scans: Vec<ScanCertaintyMap>,
    local_victims: Vec<LocalVictimMap>,
    targets: Vec<Option<VictimId>>,
    global: GlobalMaps,
    victims: Vec<Victim>,
    initial_victims: Vec<Victim>,
    victim_rngs: Vec<RngStream>,
    visits: Vec<usize>,
    colocated: BTreeSet<(usize, VictimId)>,
    tick: usize,
    ticks: Vec<TickMetrics>,
    conflict_events: Vec<ConflictEvent>,
    supervisor_log: Vec<SupervisorCall>,
    trajectories: Vec<Vec<Cell>>,
}

impl Simulation {
    /// Sets up the world for `config.seed` and records tick 0.
    pub fn new(config: &ScenarioConfig, options: RunOptions) -> Result<Self, SimError> {
        config.validate()?;
        let layout = config.layout(config.seed);
        let n = layout.robots.len();
        let victim_rngs =
            layout.victims.iter().map(|v| RngStream::derive(config.seed, StreamKind::Victim, v.id as u64)).collect();
        let mut sim = Simulation {
            options,
            env: layout.env,
            health: config.health.params(),
            params: config.control_params(),
            rules: RuleBase::standard(),
            controller: make_controller(config.controller, config.seed, n),
            occupancy: OccupancyMap::new(),
            local_scans: vec![layout.certainty.clone(); n],
            local_victims: vec![LocalVictimMap::new(); n],
            targets: vec![None; n],
            global: GlobalMaps { scan: layout.certainty, victims: GlobalVictimMap::new() },
            visits: vec![0; layout.victims.len()],
            initial_victims: layout.victims.clone(),
            victims: layout.victims,
            victim_rngs,
            colocated: BTreeSet::new(),
            tick: 0,
            ticks: Vec::new(),
            conflict_events: Vec::new(),
            supervisor_log: Vec::new(),
            trajectories: layout.robots.iter().map(|r| vec![r.position]).collect(),
            robots: layout.robots,
            config: config.clone(),
        };
        sim.detect();
        sim.sample(0, 0, 0, 0.0, 0);
        Ok(sim)
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn victims(&self) -> &[Victim] {
        &self.victims
    }

    pub fn env(&self) -> &GridEnvironment {
        &self.env
    }

    pub fn occupancy(&self) -> &OccupancyMap {
        &self.occupancy
    }

    pub fn global(&self) -> &GlobalMaps {
        &self.global
    }

    pub fn metrics(&self) -> &[TickMetrics] {
        &self.ticks
    }

    /// Advances one tick: sense, decide, move, victim dynamics, detection, metrics.
    pub fn step(&mut self) -> Result<(), SimError> {
        self.tick += 1;
        let tick = self.tick;
        self.sense();

        let conflicts = detect_conflicts(&self.robots, &self.env, self.params.tau_int, tick);
        let view = WorldView {
            tick,
            env: &self.env,
            occupancy: &self.occupancy,
            robots: &self.robots,
            local_scans: &self.local_scans,
            local_victims: &self.local_victims,
            global: &self.global,
            conflicts: &conflicts,
            rules: &self.rules,
            params: &self.params,
        };
        let started = Instant::now();
        let decision = self.controller.decide(&view)?;
        let decision_ms = if self.options.timing { started.elapsed().as_secs_f64() * 1e3 } else { 0.0 };

        if let Some(out) = &decision.supervisor {
            self.supervisor_log.push(SupervisorCall {
                tick,
                warm_value: out.warm_value,
                value: out.value,
                evaluations: out.evaluations,
            });
        }
        if let Some(plans) = &decision.plans {
            self.update_targets(plans);
        }
        self.apply_moves(&decision.moves);
        self.step_victims();
        self.detect();
        let supervisor_calls = usize::from(decision.supervisor.is_some());
        self.sample(tick, conflicts.len(), supervisor_calls, decision_ms, decision.evaluations);
        self.conflict_events.extend(conflicts);
        Ok(())
    }

    fn sense(&mut self) {
        let tick = self.tick;
        let mut observations = Vec::with_capacity(self.robots.len());
        let mut fields = Vec::with_capacity(self.robots.len());
        for (i, robot) in self.robots.iter().enumerate() {
            let field = perception_field(robot, &self.env);
            self.occupancy.register(&self.env, &field);
            let in_field: BTreeSet<Cell> = field.iter().copied().collect();
            let seen: Vec<VictimObservation> = self
                .victims
                .iter()
                .filter(|v| in_field.contains(&v.position))
                .map(|v| VictimObservation { victim: v.id, position: v.position, health: v.health, tick, observer: i })
                .collect();
            for obs in &seen {
                self.local_victims[i].observe(obs);
            }
            update_scan_certainty(&mut self.local_scans[i], std::slice::from_ref(robot));
            observations.push(seen);
            fields.push(field);
        }
        merge_into_global(&mut self.global, &self.robots, &observations);
        for (i, field) in fields.iter().enumerate() {
            self.local_victims[i] = prune_local_victim_map(&self.local_victims[i], self.targets[i], field);
        }
    }

    /// A robot's target is the unvisited victim its plan ends on, if any.
    fn update_targets(&mut self, plans: &[Path]) {
        for (i, plan) in plans.iter().enumerate() {
            let end = plan.end();
            self.targets[i] =
                self.local_victims[i].entries().find(|(_, e)| !e.visited && e.position == end).map(|(id, _)| id);
        }
    }

    fn apply_moves(&mut self, moves: &[Cell]) {
        for (i, robot) in self.robots.iter_mut().enumerate() {
            let Some(&to) = moves.get(i) else { continue };
            let legal = self.env.contains(to)
                && robot.position.chebyshev(to) <= 1
                && !self.occupancy.is_known_obstacle(to);
            if !legal {
                continue;
            }
            if self.env.is_obstacle(to) {
                // bumped into an obstacle that had not been sensed yet
                self.occupancy.register(&self.env, &[to]);
                continue;
            }
            robot.position = to;
        }
        for (trail, robot) in self.trajectories.iter_mut().zip(&self.robots) {
            trail.push(robot.position);
        }
    }

    /// Detected victims are in care: they neither move nor deteriorate.
    /// Every victim stream advances once per tick regardless.
    fn step_victims(&mut self) {
        let p_stay = self.config.victims.p_stay;
        for (v, rng) in self.victims.iter_mut().zip(&mut self.victim_rngs) {
            if v.detection.is_some() || !v.alive {
                rng.uniform();
                continue;
            }
            let moved = step_victim_motion(&self.env, v, p_stay, rng);
            *v = step_health(&moved, &self.health);
        }
    }

    /// Co-location detects a victim; each arrival counts as one visit.
    fn detect(&mut self) {
        let tick = self.tick;
        let mut now = BTreeSet::new();
        for (i, robot) in self.robots.iter().enumerate() {
            for v in self.victims.iter_mut().filter(|v| v.position == robot.position) {
                now.insert((i, v.id));
                if self.colocated.contains(&(i, v.id)) {
                    continue;
                }
                self.visits[v.id] += 1;
                self.local_victims[i].mark_visited(v.id, v.position, v.health, tick);
                self.global.victims.record(VictimObservation {
                    victim: v.id,
                    position: v.position,
                    health: v.health,
                    tick,
                    observer: i,
                });
                if v.detection.is_none() {
                    v.detection = Some(DetectionRecord { robot: i, tick, health: v.health });
                }
            }
        }
        self.colocated = now;
    }

    fn sample(&mut self, tick: usize, conflicts: usize, supervisor_calls: usize, decision_ms: f64, evals: usize) {
        self.ticks.push(TickMetrics {
            tick,
            coverage_pct: self.global.scan.coverage_pct(),
            victims_found: self.victims.iter().filter(|v| v.detection.is_some()).count(),
            victims_deceased: self.victims.iter().filter(|v| !v.alive).count(),
            conflicts,
            supervisor_calls,
            decision_ms,
            objective_evals: evals,
        });
    }

    pub fn into_record(self) -> RunRecord {
        let victims = self
            .initial_victims
            .iter()
            .zip(&self.victims)
            .map(|(a, b)| VictimRecord {
                id: b.id,
                initial_position: a.position,
                initial_health: a.health,
                final_position: b.position,
                final_health: b.health,
                alive: b.alive,
                detection: b.detection,
                visits: self.visits[b.id],
            })
            .collect();
        RunRecord {
            scenario: self.config.name.clone(),
            controller: self.config.controller,
            seed: self.config.seed,
            steps: self.tick,
            obstacles: self.env.obstacles(),
            ticks: self.ticks,
            victims,
            conflict_events: self.conflict_events,
            supervisor_log: self.supervisor_log,
            trajectories: self.trajectories,
            final_maps: FinalMaps {
                scan_certainty: self.global.scan.certainty_rows(),
                occupancy: self.occupancy.to_grid(&self.env).rows(),
                robot_scan_certainty: self.local_scans.iter().map(ScanCertaintyMap::certainty_rows).collect(),
            },
            config: self.config,
        }
    }
}

/// Runs `config` for `config.steps` ticks.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunRecord, SimError> {
    run_scenario_with(config, RunOptions::default())
}

pub fn run_scenario_with(config: &ScenarioConfig, options: RunOptions) -> Result<RunRecord, SimError> {
    let mut sim = Simulation::new(config, options)?;
    for _ in 0..config.steps {
        sim.step()?;
    }
    Ok(sim.into_record())
}
