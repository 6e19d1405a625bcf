//! Compass pattern search over continuous waypoint encodings of joint plans.

use serde::{Deserialize, Serialize};

use crate::control::JointPlan;
use crate::pathplan::{astar_shortest, Path};
use crate::world::{Cell, GridEnvironment, OccupancyMap, RngStream};

/// Flat `(x, y)` waypoint coordinates for every robot, robot by robot.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionVector {
    pub values: Vec<f64>,
    /// Waypoint count per robot.
    pub segments: Vec<usize>,
}

impl DecisionVector {
    /// Encodes each path cell as one waypoint.
    pub fn from_paths(paths: &[Path]) -> Self {
        let mut values = Vec::new();
        let mut segments = Vec::new();
        for p in paths {
            segments.push(p.len());
            for c in p.cells() {
                values.push(f64::from(c.x));
                values.push(f64::from(c.y));
            }
        }
        DecisionVector { values, segments }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        DecisionVector { values, segments: self.segments.clone() }
    }

    /// Waypoints of each robot.
    pub fn waypoints(&self) -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut offset = 0;
        for &n in &self.segments {
            out.push((0..n).map(|k| (self.values[offset + 2 * k], self.values[offset + 2 * k + 1])).collect());
            offset += 2 * n;
        }
        out
    }
}

/// Evaluation budget and mesh schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_evaluations: usize,
    pub initial_mesh: f64,
    pub contraction: f64,
    pub min_mesh: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_evaluations: 2000, initial_mesh: 2.0, contraction: 0.5, min_mesh: 0.5 }
    }
}

impl SearchBudget {
    pub fn is_valid(&self) -> bool {
        self.initial_mesh > 0.0 && self.min_mesh > 0.0 && self.contraction > 0.0 && self.contraction < 1.0
    }
}

/// Nearest cell centre, halves rounded away from zero, clipped to the grid.
pub fn round_to_cell(x: f64, y: f64, env: &GridEnvironment) -> Cell {
    let cx = (x.round() as i64).clamp(1, env.width() as i64) as i32;
    let cy = (y.round() as i64).clamp(1, env.height() as i64) as i32;
    Cell::new(cx, cy)
}

/// Turns waypoints into valid paths: round, clip, drop repeats and known
/// obstacles, bridge gaps with A*, and anchor each path at its robot.
/// Unreachable waypoints are dropped.
pub fn project_to_paths(x: &DecisionVector, starts: &[Cell], occupancy: &OccupancyMap, env: &GridEnvironment) -> JointPlan {
    let paths = x
        .waypoints()
        .into_iter()
        .zip(starts)
        .map(|(wps, &start)| {
            let mut cells = vec![start];
            for (wx, wy) in wps {
                if !wx.is_finite() || !wy.is_finite() {
                    continue;
                }
                let target = round_to_cell(wx, wy, env);
                let last = *cells.last().expect("non-empty");
                if target == last || occupancy.is_known_obstacle(target) {
                    continue;
                }
                if last.is_adjacent(target) {
                    cells.push(target);
                } else if let Ok(bridge) = astar_shortest(last, target, occupancy, env) {
                    cells.extend_from_slice(&bridge.cells()[1..]);
                }
            }
            Path::from_cells(cells)
        })
        .collect();
    JointPlan::new(paths)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub point: Vec<f64>,
    /// Objective at `point`; `None` when nothing was evaluated.
    pub value: Option<f64>,
    pub evaluations: usize,
}

/// Maximises `objective` by compass polling: each coordinate is tried at
/// `+mesh` then `-mesh` in index order and the first strict improvement is
/// accepted. A full failed poll contracts the mesh. Stops when the budget is
/// spent or the mesh falls below its minimum.
pub fn pattern_search(mut objective: impl FnMut(&[f64]) -> f64, x0: &[f64], budget: &SearchBudget) -> SearchOutcome {
    let mut point = x0.to_vec();
    if budget.max_evaluations == 0 {
        return SearchOutcome { point, value: None, evaluations: 0 };
    }
    let mut best = objective(&point);
    let mut evaluations = 1;
    let mut mesh = budget.initial_mesh;
    'outer: while mesh >= budget.min_mesh && !point.is_empty() {
        let mut improved = false;
        'poll: for i in 0..point.len() {
            for sign in [1.0, -1.0] {
                if evaluations >= budget.max_evaluations {
                    break 'outer;
                }
                let mut trial = point.clone();
                trial[i] += sign * mesh;
                let value = objective(&trial);
                evaluations += 1;
                if value > best {
                    best = value;
                    point = trial;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if !improved {
            mesh *= budget.contraction;
        }
    }
    SearchOutcome { point, value: Some(best), evaluations }
}

/// Runs `restarts` searches sharing the budget: the first from `x0`, the rest
/// from `x0` jittered by up to one initial mesh. Keeps the best result, so
/// the outcome never scores below `x0`.
pub fn pattern_search_restarts(
    mut objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    budget: &SearchBudget,
    restarts: usize,
    rng: &mut RngStream,
) -> SearchOutcome {
    let restarts = restarts.max(1);
    let share = SearchBudget { max_evaluations: budget.max_evaluations / restarts, ..*budget };
    let mut best = pattern_search(&mut objective, x0, &share);
    let mut evaluations = best.evaluations;
    for _ in 1..restarts {
        let start: Vec<f64> =
            x0.iter().map(|v| v + (2.0 * rng.uniform() - 1.0) * budget.initial_mesh).collect();
        let run = pattern_search(&mut objective, &start, &share);
        evaluations += run.evaluations;
        if run.value > best.value {
            best = run;
        }
    }
    best.evaluations = evaluations;
    best
}
