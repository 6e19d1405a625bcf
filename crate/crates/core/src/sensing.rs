//! Perception fields, scan-certainty dynamics and victim bookkeeping.
//!
//! Every scan multiplies a cell's uncertainty `z = 1 - c` by the ratio
//! `sigma = prod_i sigma_i`, where a robot at distance `r` contributes
//! `sigma_i = 1 - (1 - eta_i) * exp(-r)` inside its field (`r < r_p`) and 1
//! outside. Uncertainty is the stored quantity, which keeps certainty
//! monotone under floating-point rounding.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::world::{Cell, Grid, GridEnvironment, VictimId};

/// No-signal victim evidence reported by an imperfect (`eta < 1`) sensor.
pub const EVIDENCE_FLOOR: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    /// Perception radius in cells.
    pub radius: f64,
    /// Uncertainty retention at zero distance, in `(0, 1]`. Smaller is a stronger sensor.
    pub eta: f64,
}

impl SensorSpec {
    pub fn is_valid(&self) -> bool {
        self.radius > 0.0 && self.radius.is_finite() && self.eta > 0.0 && self.eta <= 1.0
    }

    /// This sensor's share of the uncertainty ratio at distance `r`.
    pub fn ratio_at(&self, r: f64) -> f64 {
        if r < self.radius {
            1.0 - (1.0 - self.eta) * (-r).exp()
        } else {
            1.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub id: usize,
    pub position: Cell,
    pub sensor: SensorSpec,
}

/// In-grid cells strictly closer than `r_p` to the robot, row-major.
/// Obstacles do not occlude.
pub fn perception_field(robot: &RobotState, env: &GridEnvironment) -> Vec<Cell> {
    field_around(robot.position, robot.sensor.radius, env)
}

pub fn field_around(center: Cell, radius: f64, env: &GridEnvironment) -> Vec<Cell> {
    let reach = radius.ceil() as i32;
    let mut cells = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            let c = Cell::new(center.x + dx, center.y + dy);
            if env.contains(c) && center.distance(c) < radius {
                cells.push(c);
            }
        }
    }
    cells
}

/// Joint uncertainty ratio of `cell` under all `robots`. Factors are
/// multiplied in ascending order so the result does not depend on robot order.
pub fn uncertainty_ratio(cell: Cell, robots: &[RobotState]) -> f64 {
    let mut factors: Vec<f64> = robots
        .iter()
        .map(|r| r.sensor.ratio_at(r.position.distance(cell)))
        .filter(|&s| s < 1.0)
        .collect();
    factors.sort_by(f64::total_cmp);
    factors.into_iter().product()
}

/// Per-cell scan certainty, stored as uncertainty.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanCertaintyMap {
    uncertainty: Grid<f64>,
}

impl ScanCertaintyMap {
    pub fn uniform(width: usize, height: usize, certainty: f64) -> Self {
        ScanCertaintyMap { uncertainty: Grid::filled(width, height, 1.0 - certainty.clamp(0.0, 1.0)) }
    }

    pub fn for_env(env: &GridEnvironment, certainty: f64) -> Self {
        Self::uniform(env.width(), env.height(), certainty)
    }

    pub fn width(&self) -> usize {
        self.uncertainty.width()
    }

    pub fn height(&self) -> usize {
        self.uncertainty.height()
    }

    /// Certainty of `cell`; out-of-grid cells read as fully certain.
    pub fn certainty(&self, cell: Cell) -> f64 {
        self.uncertainty.get(cell).map_or(1.0, |z| 1.0 - z)
    }

    pub fn uncertainty(&self, cell: Cell) -> f64 {
        self.uncertainty.get(cell).copied().unwrap_or(0.0)
    }

    pub fn set_certainty(&mut self, cell: Cell, certainty: f64) {
        if let Some(z) = self.uncertainty.get_mut(cell) {
            *z = 1.0 - certainty.clamp(0.0, 1.0);
        }
    }

    /// Multiplies the uncertainty of `cell` by `sigma`.
    pub fn scale_uncertainty(&mut self, cell: Cell, sigma: f64) {
        if let Some(z) = self.uncertainty.get_mut(cell) {
            *z *= sigma;
        }
    }

    /// Total scan certainty `S`.
    pub fn total(&self) -> f64 {
        self.uncertainty.values().iter().map(|z| 1.0 - z).sum()
    }

    /// `S / (L_x L_y)` as a percentage.
    pub fn coverage_pct(&self) -> f64 {
        100.0 * self.total() / self.uncertainty.values().len() as f64
    }

    pub fn certainty_rows(&self) -> Vec<Vec<f64>> {
        self.uncertainty.map(|z| 1.0 - z).rows()
    }
}

/// Applies one joint scan by `robots`. Cells outside every field keep their value.
pub fn update_scan_certainty(map: &mut ScanCertaintyMap, robots: &[RobotState]) {
    // (row-major index, cell, factor) for every in-field cell of every robot
    let mut contributions: Vec<(usize, Cell, f64)> = Vec::new();
    let (w, h) = (map.width() as i32, map.height() as i32);
    for robot in robots {
        let reach = robot.sensor.radius.ceil() as i32;
        let p = robot.position;
        for y in (p.y - reach).max(1)..=(p.y + reach).min(h) {
            for x in (p.x - reach).max(1)..=(p.x + reach).min(w) {
                let c = Cell::new(x, y);
                let s = robot.sensor.ratio_at(p.distance(c));
                if s < 1.0 {
                    contributions.push((((y - 1) * w + (x - 1)) as usize, c, s));
                }
            }
        }
    }
    contributions.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.total_cmp(&b.2)));
    let mut i = 0;
    while i < contributions.len() {
        let (idx, cell, _) = contributions[i];
        let mut sigma = 1.0;
        while i < contributions.len() && contributions[i].0 == idx {
            sigma *= contributions[i].2;
            i += 1;
        }
        map.scale_uncertainty(cell, sigma);
    }
}

/// One sighting of a victim by a robot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VictimObservation {
    pub victim: VictimId,
    pub position: Cell,
    pub health: f64,
    pub tick: usize,
    pub observer: usize,
}

/// Probability that `cell` holds a victim, as estimated by `robot` from the
/// victims it currently perceives. A signal decays with distance through the
/// same kernel as the certainty gain; without a signal an imperfect sensor
/// still reports a small floor.
pub fn victim_evidence(robot: &RobotState, cell: Cell, victims_in_field: &[VictimObservation]) -> f64 {
    let r = robot.position.distance(cell);
    let signal = r < robot.sensor.radius && victims_in_field.iter().any(|o| o.position == cell);
    if signal {
        (1.0 - robot.sensor.eta) * (-r).exp()
    } else if robot.sensor.eta >= 1.0 {
        0.0
    } else {
        EVIDENCE_FLOOR
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalVictimEntry {
    pub position: Cell,
    pub health: f64,
    pub tick: usize,
    pub visited: bool,
}

/// A robot's short memory of victims.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LocalVictimMap {
    entries: BTreeMap<VictimId, LocalVictimEntry>,
}

impl LocalVictimMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, obs: &VictimObservation) {
        let visited = self.entries.get(&obs.victim).is_some_and(|e| e.visited);
        self.entries.insert(
            obs.victim,
            LocalVictimEntry { position: obs.position, health: obs.health, tick: obs.tick, visited },
        );
    }

    pub fn mark_visited(&mut self, victim: VictimId, position: Cell, health: f64, tick: usize) {
        self.entries.insert(victim, LocalVictimEntry { position, health, tick, visited: true });
    }

    pub fn get(&self, victim: VictimId) -> Option<&LocalVictimEntry> {
        self.entries.get(&victim)
    }

    pub fn entries(&self) -> impl Iterator<Item = (VictimId, &LocalVictimEntry)> {
        self.entries.iter().map(|(&id, e)| (id, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Keeps the current target, visited victims, and victims inside `field`.
pub fn prune_local_victim_map(map: &LocalVictimMap, current_target: Option<VictimId>, field: &[Cell]) -> LocalVictimMap {
    let in_field: BTreeSet<Cell> = field.iter().copied().collect();
    LocalVictimMap {
        entries: map
            .entries
            .iter()
            .filter(|(&id, e)| Some(id) == current_target || e.visited || in_field.contains(&e.position))
            .map(|(&id, e)| (id, *e))
            .collect(),
    }
}

/// Every observation made by any robot, grouped per victim.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GlobalVictimMap {
    records: BTreeMap<VictimId, Vec<VictimObservation>>,
}

impl GlobalVictimMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, obs: VictimObservation) {
        let list = self.records.entry(obs.victim).or_default();
        if !list.contains(&obs) {
            list.push(obs);
        }
    }

    pub fn observations(&self, victim: VictimId) -> &[VictimObservation] {
        self.records.get(&victim).map_or(&[], Vec::as_slice)
    }

    pub fn victims(&self) -> impl Iterator<Item = VictimId> + '_ {
        self.records.keys().copied()
    }

    /// Most recent observation of each known victim.
    pub fn last_seen(&self) -> Vec<VictimObservation> {
        self.records
            .values()
            .filter_map(|obs| obs.iter().max_by_key(|o| (o.tick, std::cmp::Reverse(o.observer))).copied())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Global scan certainty and victim maps held by the supervisor.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalMaps {
    pub scan: ScanCertaintyMap,
    pub victims: GlobalVictimMap,
}

/// Folds this tick's local information into the global maps: one joint scan
/// update with every robot and the union of all new observations.
pub fn merge_into_global(global: &mut GlobalMaps, robots: &[RobotState], observations: &[Vec<VictimObservation>]) {
    if !robots.is_empty() {
        update_scan_certainty(&mut global.scan, robots);
    }
    for obs in observations.iter().flatten() {
        global.victims.record(*obs);
    }
}
