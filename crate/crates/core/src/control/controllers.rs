use std::collections::BTreeSet;

use crate::error::FuzzyError;
use crate::fuzzy::PriorityMap;
use crate::pathplan::{best_candidate, grade_path, local_candidates, plan_local_avoiding, GradedPath, Path};
use crate::world::{Cell, RngStream, StreamKind};

use super::{Controller, ControllerKind, Decision, JointPlan, MpcProblem, WorldView};

fn all_priorities(view: &WorldView<'_>) -> Result<Vec<PriorityMap>, FuzzyError> {
    (0..view.robots.len()).map(|i| view.priorities(i)).collect()
}

fn supervisor_priorities(view: &WorldView<'_>) -> Result<Vec<PriorityMap>, FuzzyError> {
    (0..view.robots.len()).map(|i| view.global_priorities(i)).collect()
}

/// Best local path per robot and the longest candidate seen.
fn local_plans(view: &WorldView<'_>, priorities: &[PriorityMap]) -> (Vec<GradedPath>, usize) {
    let none = BTreeSet::new();
    let mut longest = 1;
    let plans = view
        .robots
        .iter()
        .zip(priorities)
        .map(|(r, pm)| {
            let cands = local_candidates(r, pm, view.occupancy, view.env, view.params.k_paths, &view.params.grade, &none);
            longest = cands.iter().map(|c| c.path.len()).max().unwrap_or(1).max(longest);
            best_candidate(cands).unwrap_or_else(|| grade_path(Path::stay(r.position), pm, &view.params.grade))
        })
        .collect();
    (plans, longest)
}

/// Each robot follows its own best graded path.
#[derive(Debug, Default)]
pub struct SelfishController;

impl SelfishController {
    pub fn new() -> Self {
        SelfishController
    }
}

impl Controller for SelfishController {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Selfish
    }

    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError> {
        let priorities = all_priorities(view)?;
        let (plans, _) = local_plans(view, &priorities);
        let paths: Vec<Path> = plans.into_iter().map(|g| g.path).collect();
        Ok(Decision { moves: paths.iter().map(Path::next_step).collect(), plans: Some(paths), ..Decision::default() })
    }
}

/// Local planning, with the supervisor stepping in on ticks with field conflicts.
#[derive(Debug)]
pub struct CooperativeController {
    rng: RngStream,
}

impl CooperativeController {
    pub fn new(seed: u64) -> Self {
        CooperativeController { rng: RngStream::derive(seed, StreamKind::Optimizer, 0) }
    }
}

/// Reroutes robots off shared victim cells with the local planner. At each
/// shared cell the robot losing less grade (ties: the later robot) gives way.
fn reroute(view: &WorldView<'_>, priorities: &[PriorityMap], plans: &[GradedPath], victim_cells: &BTreeSet<Cell>) -> JointPlan {
    let mut plan = JointPlan::new(plans.iter().map(|g| g.path.clone()).collect());
    let mut grades: Vec<f64> = plans.iter().map(|g| g.grade).collect();
    let mut avoid: Vec<BTreeSet<Cell>> = vec![BTreeSet::new(); plans.len()];
    let limit = plans.len() * (victim_cells.len() + 1);
    for _ in 0..limit {
        let Some(&(cell, i, j)) = plan.victim_conflicts(victim_cells).first() else {
            break;
        };
        let mut best: Option<(f64, usize, GradedPath)> = None;
        for r in [i, j] {
            if plan.paths()[r].origin() == cell || avoid[r].contains(&cell) {
                continue;
            }
            let mut set = avoid[r].clone();
            set.insert(cell);
            let alt = plan_local_avoiding(
                &view.robots[r],
                &priorities[r],
                view.occupancy,
                view.env,
                view.params.k_paths,
                &view.params.grade,
                &set,
            );
            let loss = grades[r] - alt.grade;
            if best.as_ref().is_none_or(|b| loss <= b.0) {
                best = Some((loss, r, alt));
            }
        }
        let Some((_, r, alt)) = best else { break };
        avoid[r].insert(cell);
        grades[r] = alt.grade;
        plan.set_path(r, alt.path);
    }
    plan
}

impl Controller for CooperativeController {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Cooperative
    }

    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError> {
        let priorities = all_priorities(view)?;
        let (plans, longest) = local_plans(view, &priorities);
        if view.conflicts.is_empty() {
            let paths: Vec<Path> = plans.into_iter().map(|g| g.path).collect();
            return Ok(Decision { moves: paths.iter().map(Path::next_step).collect(), plans: Some(paths), ..Decision::default() });
        }
        let victim_cells = view.victim_cells();
        let priorities = supervisor_priorities(view)?;
        let plans: Vec<GradedPath> =
            plans.into_iter().zip(&priorities).map(|(g, pm)| grade_path(g.path, pm, &view.params.grade)).collect();
        let warm = reroute(view, &priorities, &plans, &victim_cells);
        let problem = MpcProblem::new(
            view.env,
            view.occupancy,
            &view.global.scan,
            view.robots,
            &priorities,
            victim_cells,
            view.params,
            longest,
        );
        let (warm, _) = problem.repair(&warm);
        let outcome = problem.solve(&warm, 1, &mut self.rng);
        Ok(Decision {
            moves: outcome.plan.first_moves(),
            plans: Some(outcome.plan.paths().to_vec()),
            evaluations: outcome.evaluations,
            supervisor: Some(outcome),
        })
    }
}

/// The supervisor plans every tick from the shifted previous plan, with no
/// local planning.
#[derive(Debug)]
pub struct PureMpcController {
    rng: RngStream,
    previous: Option<JointPlan>,
}

impl PureMpcController {
    pub fn new(seed: u64) -> Self {
        PureMpcController { rng: RngStream::derive(seed, StreamKind::Optimizer, 0), previous: None }
    }

    fn warm_start(&self, view: &WorldView<'_>) -> JointPlan {
        let Some(prev) = &self.previous else {
            return JointPlan::stay(view.robots);
        };
        let paths = prev
            .paths()
            .iter()
            .zip(view.robots)
            .map(|(p, r)| {
                if p.len() > 1 && p.cells()[1] == r.position {
                    p.shifted()
                } else if p.origin() == r.position {
                    p.clone()
                } else {
                    Path::stay(r.position)
                }
            })
            .collect();
        JointPlan::new(paths)
    }
}

impl Controller for PureMpcController {
    fn kind(&self) -> ControllerKind {
        ControllerKind::PureMpc
    }

    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError> {
        let priorities = supervisor_priorities(view)?;
        let warm = self.warm_start(view);
        let waypoints = view.params.mpc_waypoints.max(1);
        // a path to the far edge of a field is at most ceil(r_p) cells long
        let reach = view.robots.iter().map(|r| r.sensor.radius.ceil() as usize).max().unwrap_or(1);
        let problem = MpcProblem::new(
            view.env,
            view.occupancy,
            &view.global.scan,
            view.robots,
            &priorities,
            view.victim_cells(),
            view.params,
            reach.max(waypoints),
        );
        let outcome = problem.solve(&warm, waypoints, &mut self.rng);
        self.previous = Some(outcome.plan.clone());
        Ok(Decision {
            moves: outcome.plan.first_moves(),
            plans: Some(outcome.plan.paths().to_vec()),
            evaluations: outcome.evaluations,
            supervisor: Some(outcome),
        })
    }
}

fn open_neighbors(view: &WorldView<'_>, cell: Cell) -> Vec<Cell> {
    view.env.neighbors(cell).filter(|c| !view.occupancy.is_known_obstacle(*c)).collect()
}

/// Greedy coverage: step to the neighbour with the lowest global certainty.
#[derive(Debug)]
pub struct AcsController {
    rngs: Vec<RngStream>,
}

impl AcsController {
    pub fn new(seed: u64, robots: usize) -> Self {
        AcsController { rngs: (0..robots).map(|i| RngStream::derive(seed, StreamKind::Robot, i as u64)).collect() }
    }
}

impl Controller for AcsController {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Acs
    }

    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError> {
        let scan = &view.global.scan;
        let moves = view
            .robots
            .iter()
            .zip(&mut self.rngs)
            .map(|(r, rng)| {
                let options = open_neighbors(view, r.position);
                let Some(min) = options.iter().map(|c| scan.certainty(*c)).min_by(f64::total_cmp) else {
                    return r.position;
                };
                let ties: Vec<Cell> = options.into_iter().filter(|c| scan.certainty(*c) == min).collect();
                ties[rng.index(ties.len())]
            })
            .collect();
        Ok(Decision { moves, ..Decision::default() })
    }
}

/// Random walk over open neighbours.
#[derive(Debug)]
pub struct ExhaustiveController {
    rngs: Vec<RngStream>,
}

impl ExhaustiveController {
    pub fn new(seed: u64, robots: usize) -> Self {
        ExhaustiveController { rngs: (0..robots).map(|i| RngStream::derive(seed, StreamKind::Robot, i as u64)).collect() }
    }
}

impl Controller for ExhaustiveController {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Exhaustive
    }

    fn decide(&mut self, view: &WorldView<'_>) -> Result<Decision, FuzzyError> {
        let moves = view
            .robots
            .iter()
            .zip(&mut self.rngs)
            .map(|(r, rng)| {
                let options = open_neighbors(view, r.position);
                if options.is_empty() {
                    r.position
                } else {
                    options[rng.index(options.len())]
                }
            })
            .collect();
        Ok(Decision { moves, ..Decision::default() })
    }
}
