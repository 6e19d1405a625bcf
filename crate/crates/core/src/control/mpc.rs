use std::collections::{BTreeSet, HashMap};

use crate::fuzzy::PriorityMap;
use crate::optimize::{pattern_search_restarts, project_to_paths, DecisionVector};
use crate::pathplan::{grade_path, Path};
use crate::sensing::{update_scan_certainty, RobotState, ScanCertaintyMap};
use crate::world::{Cell, GridEnvironment, OccupancyMap, RngStream};

use super::{ControlParams, JointPlan};

/// Subtracted from the normalised objective of a plan that still shares a
/// victim cell between robots after repair.
pub const PENALTY: f64 = 1e3;

/// Rolls the scan dynamics forward along `plan`, one cell per step for
/// `horizon` steps. Robots whose path has ended keep scanning from its last cell.
pub fn predict_certainty(map: &ScanCertaintyMap, plan: &JointPlan, robots: &[RobotState]) -> ScanCertaintyMap {
    let mut predicted = map.clone();
    let mut moved: Vec<RobotState> = robots.to_vec();
    for t in 0..plan.horizon() {
        for (r, p) in moved.iter_mut().zip(plan.paths()) {
            r.position = p.at(t);
        }
        update_scan_certainty(&mut predicted, &moved);
    }
    predicted
}

/// Result of one supervisory optimisation.
#[derive(Clone, Debug, PartialEq)]
pub struct SupervisorOutcome {
    pub plan: JointPlan,
    /// Objective of the warm start.
    pub warm_value: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// The supervisory problem at one tick: maximise
/// `w1 * sum(g_i) / G_norm + w2 * sum(c_pred) / (L_x L_y)` over joint plans.
pub struct MpcProblem<'a> {
    pub env: &'a GridEnvironment,
    pub occupancy: &'a OccupancyMap,
    pub scan: &'a ScanCertaintyMap,
    pub robots: &'a [RobotState],
    pub priorities: &'a [PriorityMap],
    pub victim_cells: BTreeSet<Cell>,
    pub params: &'a ControlParams,
    grade_norm: f64,
}

impl<'a> MpcProblem<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        env: &'a GridEnvironment,
        occupancy: &'a OccupancyMap,
        scan: &'a ScanCertaintyMap,
        robots: &'a [RobotState],
        priorities: &'a [PriorityMap],
        victim_cells: BTreeSet<Cell>,
        params: &'a ControlParams,
        longest_candidate: usize,
    ) -> Self {
        let g = &params.grade;
        let grade_norm = robots.len().max(1) as f64 * g.c2 * g.priority_scale * longest_candidate.max(1) as f64;
        MpcProblem { env, occupancy, scan, robots, priorities, victim_cells, params, grade_norm }
    }

    pub fn grade_norm(&self) -> f64 {
        self.grade_norm
    }

    pub fn path_grade(&self, robot: usize, path: &Path) -> f64 {
        grade_path(path.clone(), &self.priorities[robot], &self.params.grade).grade
    }

    /// Objective without constraint handling.
    pub fn score(&self, plan: &JointPlan) -> f64 {
        let grades: f64 = plan.paths().iter().enumerate().map(|(i, p)| self.path_grade(i, p)).sum();
        let predicted = predict_certainty(self.scan, plan, self.robots);
        let cells = (self.env.width() * self.env.height()) as f64;
        self.params.w1 * grades / self.grade_norm + self.params.w2 * predicted.total() / cells
    }

    /// Resolves shared victim cells by cutting one of the two paths just
    /// before the cell; the robot losing less grade is cut. Returns the
    /// repaired plan and whether it is conflict-free.
    pub fn repair(&self, plan: &JointPlan) -> (JointPlan, bool) {
        let mut plan = plan.clone();
        // every cut shortens a path, so this terminates
        let limit = plan.paths().iter().map(Path::len).sum::<usize>() + 1;
        for _ in 0..limit {
            let Some(&(cell, i, j)) = plan.victim_conflicts(&self.victim_cells).first() else {
                return (plan, true);
            };
            let option = |r: usize| {
                plan.paths()[r].truncated_before(cell).map(|cut| {
                    let loss = self.path_grade(r, &plan.paths()[r]) - self.path_grade(r, &cut);
                    (loss, r, cut)
                })
            };
            let choice = match (option(i), option(j)) {
                (Some(a), Some(b)) => Some(if a.0 < b.0 { a } else { b }),
                (a, b) => a.or(b),
            };
            match choice {
                Some((_, r, cut)) => plan.set_path(r, cut),
                None => return (plan, false),
            }
        }
        let ok = plan.victim_conflicts(&self.victim_cells).is_empty();
        (plan, ok)
    }

    /// Repaired plan and its penalised objective.
    pub fn evaluate(&self, plan: &JointPlan) -> (JointPlan, f64) {
        let (repaired, feasible) = self.repair(plan);
        let value = self.score(&repaired) - if feasible { 0.0 } else { PENALTY };
        (repaired, value)
    }

    fn decode(&self, x: &DecisionVector) -> JointPlan {
        let starts: Vec<Cell> = self.robots.iter().map(|r| r.position).collect();
        project_to_paths(x, &starts, self.occupancy, self.env)
    }

    /// Pattern search from `warm`, encoded with at least `min_waypoints`
    /// waypoints per robot. The returned value is never below the warm start's.
    pub fn solve(&self, warm: &JointPlan, min_waypoints: usize, rng: &mut RngStream) -> SupervisorOutcome {
        let x0 = encode_padded(warm, min_waypoints);
        let mut cache: HashMap<JointPlan, f64> = HashMap::new();
        let mut objective = |values: &[f64]| {
            let plan = self.decode(&x0.with_values(values.to_vec()));
            *cache.entry(plan).or_insert_with_key(|p| self.evaluate(p).1)
        };
        let warm_value = objective(&x0.values);
        let outcome = pattern_search_restarts(&mut objective, &x0.values, &self.params.budget, self.params.restarts, rng);
        if outcome.value.is_none() {
            let (plan, value) = self.evaluate(&self.decode(&x0));
            return SupervisorOutcome { plan, warm_value, value, evaluations: 0 };
        }
        let (plan, value) = self.evaluate(&self.decode(&x0.with_values(outcome.point)));
        SupervisorOutcome { plan, warm_value, value, evaluations: outcome.evaluations }
    }
}

/// Encodes `plan`, repeating each path's last cell up to `min_waypoints`.
fn encode_padded(plan: &JointPlan, min_waypoints: usize) -> DecisionVector {
    let padded: Vec<Path> = plan
        .paths()
        .iter()
        .map(|p| {
            let mut cells = p.cells().to_vec();
            while cells.len() < min_waypoints {
                cells.push(p.end());
            }
            Path::from_cells(cells)
        })
        .collect();
    DecisionVector::from_paths(&padded)
}
