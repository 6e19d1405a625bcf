//! Controllers and the supervisory MPC.
//!
//! Every controller sees the same [`WorldView`] and returns one move per
//! robot. The local (fuzzy + path grading) pipeline is shared by the
//! selfish, cooperative and pure-MPC controllers.

mod controllers;
mod mpc;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use controllers::{AcsController, CooperativeController, ExhaustiveController, PureMpcController, SelfishController};
pub use mpc::{predict_certainty, MpcProblem, SupervisorOutcome, PENALTY};

use crate::error::FuzzyError;
use crate::fuzzy::{build_priority_map, unvisited_in_field, PriorityMap, RuleBase};
use crate::optimize::SearchBudget;
use crate::pathplan::{GradeParams, Path};
use crate::sensing::{perception_field, GlobalMaps, LocalVictimMap, RobotState, ScanCertaintyMap};
use crate::world::{Cell, GridEnvironment, OccupancyMap};

/// One path per robot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointPlan {
    paths: Vec<Path>,
}

impl JointPlan {
    pub fn new(paths: Vec<Path>) -> Self {
        JointPlan { paths }
    }

    pub fn stay(robots: &[RobotState]) -> Self {
        JointPlan { paths: robots.iter().map(|r| Path::stay(r.position)).collect() }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<Path> {
        self.paths
    }

    pub fn set_path(&mut self, robot: usize, path: Path) {
        self.paths[robot] = path;
    }

    /// Prediction horizon: the longest path length.
    pub fn horizon(&self) -> usize {
        self.paths.iter().map(Path::len).max().unwrap_or(1)
    }

    pub fn first_moves(&self) -> Vec<Cell> {
        self.paths.iter().map(Path::next_step).collect()
    }

    /// Victim cells that appear in two different robots' paths, with the
    /// pair, in `(cell, i, j)` order. A cell that starts both paths cannot be
    /// avoided and is not reported.
    pub fn victim_conflicts(&self, victim_cells: &BTreeSet<Cell>) -> Vec<(Cell, usize, usize)> {
        let mut out = Vec::new();
        for &cell in victim_cells {
            for i in 0..self.paths.len() {
                for j in i + 1..self.paths.len() {
                    let (a, b) = (&self.paths[i], &self.paths[j]);
                    if a.contains(cell) && b.contains(cell) && !(a.origin() == cell && b.origin() == cell) {
                        out.push((cell, i, j));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self, robots: &[RobotState], occupancy: &OccupancyMap, env: &GridEnvironment) -> bool {
        self.paths.len() == robots.len()
            && self.paths.iter().zip(robots).all(|(p, r)| p.is_valid(r.position, occupancy, env))
    }
}

/// Perception-field overlap above the conflict threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictEvent {
    pub robots: (usize, usize),
    pub overlap: usize,
    pub tick: usize,
}

/// Unordered robot pairs (by index) whose fields share more than `threshold` cells.
pub fn detect_conflicts(robots: &[RobotState], env: &GridEnvironment, threshold: usize, tick: usize) -> Vec<ConflictEvent> {
    let fields: Vec<BTreeSet<Cell>> = robots.iter().map(|r| perception_field(r, env).into_iter().collect()).collect();
    let mut events = Vec::new();
    for i in 0..robots.len() {
        for j in i + 1..robots.len() {
            let overlap = fields[i].intersection(&fields[j]).count();
            if overlap > threshold {
                events.push(ConflictEvent { robots: (i, j), overlap, tick });
            }
        }
    }
    events
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Cooperative,
    Selfish,
    PureMpc,
    Acs,
    Exhaustive,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 5] = [
        ControllerKind::Cooperative,
        ControllerKind::Selfish,
        ControllerKind::PureMpc,
        ControllerKind::Acs,
        ControllerKind::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Cooperative => "cooperative",
            ControllerKind::Selfish => "selfish",
            ControllerKind::PureMpc => "pure_mpc",
            ControllerKind::Acs => "acs",
            ControllerKind::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ControllerKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "pure-mpc" && *k == ControllerKind::PureMpc))
            .ok_or_else(|| format!("unknown controller `{s}` (expected one of cooperative, selfish, pure_mpc, acs, exhaustive)"))
    }
}

/// Planning and supervisory parameters shared by the controllers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    pub grade: GradeParams,
    /// Candidate paths per goal cell.
    pub k_paths: usize,
    /// Conflict threshold on field overlap.
    pub tau_int: usize,
    pub w1: f64,
    pub w2: f64,
    pub budget: SearchBudget,
    pub restarts: usize,
    /// Minimum waypoints per robot in the pure-MPC encoding.
    pub mpc_waypoints: usize,
}

/// Read-only state handed to a controller each tick.
#[derive(Clone, Copy)]
pub struct WorldView<'a> {
    pub tick: usize,
    pub env: &'a GridEnvironment,
    pub occupancy: &'a OccupancyMap,
    pub robots: &'a [RobotState],
    pub local_scans: &'a [ScanCertaintyMap],
    pub local_victims: &'a [LocalVictimMap],
    pub global: &'a GlobalMaps,
    pub conflicts: &'a [ConflictEvent],
    pub rules: &'a RuleBase,
    pub params: &'a ControlParams,
}

impl WorldView<'_> {
    /// Robot `i`'s priority map over its current field.
    pub fn priorities(&self, i: usize) -> Result<PriorityMap, FuzzyError> {
        let robot = &self.robots[i];
        let field = perception_field(robot, self.env);
        let victims = unvisited_in_field(&self.local_victims[i], &field, self.tick, robot.id);
        build_priority_map(robot, &field, &victims, &self.local_scans[i], self.occupancy, self.rules)
    }

    /// Robot `i`'s priorities as the supervisor sees them: the same sightings,
    /// scored against the global scan certainty that merges every robot's scans.
    pub fn global_priorities(&self, i: usize) -> Result<PriorityMap, FuzzyError> {
        let robot = &self.robots[i];
        let field = perception_field(robot, self.env);
        let victims = unvisited_in_field(&self.local_victims[i], &field, self.tick, robot.id);
        build_priority_map(robot, &field, &victims, &self.global.scan, self.occupancy, self.rules)
    }

    /// Last known cells of every victim the supervisor has heard of.
    pub fn victim_cells(&self) -> BTreeSet<Cell> {
        self.global.victims.last_seen().into_iter().map(|o| o.position).collect()
    }
}

/// A controller's output for one tick.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Decision {
    pub moves: Vec<Cell>,
    /// Planned paths, when the controller plans.
    pub plans: Option<Vec<Path>>,
    pub evaluations: usize,
    pub supervisor: Option<SupervisorOutcome>,
}

pub trait Controller: Send {
    fn kind(&self) -> ControllerKind;
    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError>;
}

pub fn make_controller(kind: ControllerKind, seed: u64, robots: usize) -> Box<dyn Controller> {
    match kind {
        ControllerKind::Cooperative => Box::new(CooperativeController::new(seed)),
        ControllerKind::Selfish => Box::new(SelfishController::new()),
        ControllerKind::PureMpc => Box::new(PureMpcController::new(seed)),
        ControllerKind::Acs => Box::new(AcsController::new(seed, robots)),
        ControllerKind::Exhaustive => Box::new(ExhaustiveController::new(seed, robots)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::SensorSpec;

    fn robot(id: usize, x: i32, y: i32, radius: f64) -> RobotState {
        RobotState { id, position: Cell::new(x, y), sensor: SensorSpec { radius, eta: 0.1 } }
    }

    #[test]
    fn distant_robots_do_not_conflict() {
        let env = GridEnvironment::new(40, 25, []).unwrap();
        let robots = [robot(0, 2, 2, 6.0), robot(1, 20, 20, 4.0)];
        assert!(detect_conflicts(&robots, &env, 30, 0).is_empty());
    }

    #[test]
    fn colocated_robots_conflict_on_the_smaller_field() {
        let env = GridEnvironment::new(40, 25, []).unwrap();
        let robots = [robot(0, 20, 12, 6.0), robot(1, 20, 12, 4.0)];
        let small = perception_field(&robots[1], &env).len();
        let events = detect_conflicts(&robots, &env, 30, 5);
        assert_eq!(events, vec![ConflictEvent { robots: (0, 1), overlap: small, tick: 5 }]);
        assert!(small > 30);
    }

    #[test]
    fn overlap_equal_to_threshold_is_not_a_conflict() {
        let env = GridEnvironment::new(40, 25, []).unwrap();
        let robots = [robot(0, 20, 12, 6.0), robot(1, 20, 12, 4.0)];
        let overlap = detect_conflicts(&robots, &env, 0, 0)[0].overlap;
        assert!(detect_conflicts(&robots, &env, overlap, 0).is_empty());
        assert_eq!(detect_conflicts(&robots, &env, overlap - 1, 0).len(), 1);
    }

    #[test]
    fn conflicts_are_symmetric() {
        let env = GridEnvironment::new(30, 30, []).unwrap();
        let a = robot(0, 10, 10, 6.0);
        let b = robot(1, 13, 12, 4.0);
        let ab = detect_conflicts(&[a, b], &env, 5, 0);
        let ba = detect_conflicts(&[b, a], &env, 5, 0);
        assert_eq!(ab[0].overlap, ba[0].overlap);
    }

    #[test]
    fn controller_names_round_trip() {
        for k in ControllerKind::ALL {
            assert_eq!(k.name().parse::<ControllerKind>().unwrap(), k);
        }
        assert!("greedy".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn victim_conflict_ignores_shared_start() {
        let c = Cell::new(3, 3);
        let plan = JointPlan::new(vec![Path::stay(c), Path::stay(c)]);
        assert!(plan.victim_conflicts(&[c].into_iter().collect()).is_empty());
        let plan = JointPlan::new(vec![Path::stay(c), Path::from_cells(vec![Cell::new(2, 2), c])]);
        assert_eq!(plan.victim_conflicts(&[c].into_iter().collect()), vec![(c, 0, 1)]);
    }
}
