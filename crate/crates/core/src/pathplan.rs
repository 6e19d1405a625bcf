//! Candidate path generation (A* and Yen's k-shortest loopless paths) and
//! path grading.
//!
//! Movement is 8-connected with unit step cost; only known obstacles block.
//! Path length counts cells, so a stay-in-place path has length 1.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::PathError;
use crate::fuzzy::PriorityMap;
use crate::sensing::RobotState;
use crate::world::{Cell, GridEnvironment, OccupancyMap};

/// Ordered cells, each consecutive pair 8-adjacent and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    cells: Vec<Cell>,
}

impl Path {
    /// Wraps `cells` without validation; `cells` must not be empty.
    pub fn from_cells(cells: Vec<Cell>) -> Self {
        assert!(!cells.is_empty(), "a path has at least one cell");
        Path { cells }
    }

    pub fn stay(cell: Cell) -> Self {
        Path { cells: vec![cell] }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self) -> Cell {
        self.cells[0]
    }

    pub fn end(&self) -> Cell {
        *self.cells.last().expect("non-empty")
    }

    /// Cell occupied after one step; the origin for a stay path.
    pub fn next_step(&self) -> Cell {
        self.cells.get(1).copied().unwrap_or(self.cells[0])
    }

    /// Position at step `t`, holding the final cell once the path ends.
    pub fn at(&self, t: usize) -> Cell {
        self.cells[t.min(self.cells.len() - 1)]
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    /// Prefix up to (excluding) the first occurrence of `cell`; `None` if the
    /// path starts on `cell` or never visits it.
    pub fn truncated_before(&self, cell: Cell) -> Option<Path> {
        let pos = self.cells.iter().position(|&c| c == cell)?;
        (pos > 0).then(|| Path { cells: self.cells[..pos].to_vec() })
    }

    /// The path after one executed step.
    pub fn shifted(&self) -> Path {
        if self.cells.len() > 1 {
            Path { cells: self.cells[1..].to_vec() }
        } else {
            self.clone()
        }
    }

    pub fn into_cells(self) -> Vec<Cell> {
        self.cells
    }

    /// Checks origin anchoring, grid membership, adjacency and known obstacles.
    pub fn is_valid(&self, origin: Cell, occupancy: &OccupancyMap, env: &GridEnvironment) -> bool {
        self.cells[0] == origin
            && self.cells.iter().all(|&c| env.contains(c) && !occupancy.is_known_obstacle(c))
            && self.cells.windows(2).all(|w| w[0].is_adjacent(w[1]))
    }
}

/// A* over cells accepted by `passable`, never crossing a banned edge.
/// Heuristic is the Chebyshev distance; ties on `f` break by `h`, then by
/// row-major cell order.
fn search(
    env: &GridEnvironment,
    origin: Cell,
    goal: Cell,
    passable: &dyn Fn(Cell) -> bool,
    banned: &dyn Fn(Cell, Cell) -> bool,
) -> Option<Vec<Cell>> {
    if !env.contains(origin) || !env.contains(goal) || !passable(goal) {
        return None;
    }
    let w = env.width();
    let idx = |c: Cell| (c.y as usize - 1) * w + (c.x as usize - 1);
    let n = env.cell_count();
    let mut g = vec![u32::MAX; n];
    let mut parent: Vec<Option<Cell>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[idx(origin)] = 0;
    let h0 = origin.chebyshev(goal) as u32;
    open.push(Reverse((h0, h0, origin)));
    while let Some(Reverse((_, _, cell))) = open.pop() {
        let ci = idx(cell);
        if closed[ci] {
            continue;
        }
        if cell == goal {
            let mut cells = vec![goal];
            let mut cur = goal;
            while let Some(p) = parent[idx(cur)] {
                cells.push(p);
                cur = p;
            }
            cells.reverse();
            return Some(cells);
        }
        closed[ci] = true;
        let next_g = g[ci] + 1;
        for nb in env.neighbors(cell) {
            let ni = idx(nb);
            if closed[ni] || !passable(nb) || banned(cell, nb) || next_g >= g[ni] {
                continue;
            }
            g[ni] = next_g;
            parent[ni] = Some(cell);
            let h = nb.chebyshev(goal) as u32;
            open.push(Reverse((next_g + h, h, nb)));
        }
    }
    None
}

/// Minimum-step path around known obstacles.
pub fn astar_shortest(origin: Cell, goal: Cell, occupancy: &OccupancyMap, env: &GridEnvironment) -> Result<Path, PathError> {
    for c in [origin, goal] {
        if !env.contains(c) {
            return Err(PathError::OutsideGrid(c));
        }
    }
    search(env, origin, goal, &|c| !occupancy.is_known_obstacle(c), &|_, _| false)
        .map(Path::from_cells)
        .ok_or(PathError::NoPath { from: origin, to: goal })
}

/// Up to `k` loopless paths in non-decreasing length.
pub fn yen_k_shortest(origin: Cell, goal: Cell, k: usize, occupancy: &OccupancyMap, env: &GridEnvironment) -> Vec<Path> {
    yen_k_shortest_avoiding(origin, goal, k, occupancy, env, &BTreeSet::new())
}

/// Yen's algorithm with `avoid` treated as extra obstacles (the origin is
/// always allowed). Equal-length candidates are ranked by their cell sequence.
pub fn yen_k_shortest_avoiding(
    origin: Cell,
    goal: Cell,
    k: usize,
    occupancy: &OccupancyMap,
    env: &GridEnvironment,
    avoid: &BTreeSet<Cell>,
) -> Vec<Path> {
    let free = |c: Cell| c == origin || (!occupancy.is_known_obstacle(c) && !avoid.contains(&c));
    let Some(first) = search(env, origin, goal, &free, &|_, _| false) else {
        return Vec::new();
    };
    let mut found: Vec<Vec<Cell>> = vec![first];
    let mut candidates: BTreeSet<(usize, Vec<Cell>)> = BTreeSet::new();
    while found.len() < k {
        let last = found.last().expect("non-empty").clone();
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let banned_edges: Vec<(Cell, Cell)> = found
                .iter()
                .filter(|p| p.len() > i + 1 && &p[..=i] == root)
                .map(|p| (p[i], p[i + 1]))
                .collect();
            let root_nodes: BTreeSet<Cell> = root[..i].iter().copied().collect();
            let passable = |c: Cell| !root_nodes.contains(&c) && (c == spur || free(c));
            let banned = |a: Cell, b: Cell| banned_edges.contains(&(a, b));
            if let Some(tail) = search(env, spur, goal, &passable, &banned) {
                let mut total = root[..i].to_vec();
                total.extend(tail);
                if !found.contains(&total) {
                    candidates.insert((total.len(), total));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, best)) => found.push(best),
            None => break,
        }
    }
    found.into_iter().map(Path::from_cells).collect()
}

/// Weights of the path grade.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradeParams {
    /// Cost per cell of path length.
    pub c1: f64,
    /// Weight of the exploration degree.
    pub c2: f64,
    /// Per-step discount of priorities along the path.
    pub lambda: f64,
    /// Factor mapping unit-interval priorities onto the scale the weights are tuned for.
    pub priority_scale: f64,
}

/// Discounted sum of priorities along `path`, offset from the path origin.
pub fn exploration_degree(path: &Path, priorities: &PriorityMap, lambda: f64) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for &c in path.cells() {
        total += weight * priorities.value(c);
        weight *= lambda;
    }
    total
}

pub fn grade(length: usize, exploration: f64, c1: f64, c2: f64) -> f64 {
    -c1 * length as f64 + c2 * exploration
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedPath {
    pub path: Path,
    /// Exploration degree on the scaled priority axis.
    pub exploration: f64,
    pub grade: f64,
}

pub fn grade_path(path: Path, priorities: &PriorityMap, params: &GradeParams) -> GradedPath {
    let exploration = params.priority_scale * exploration_degree(&path, priorities, params.lambda);
    let grade = grade(path.len(), exploration, params.c1, params.c2);
    GradedPath { path, exploration, grade }
}

/// All graded candidates: up to `k` shortest paths to every cell of the
/// priority map, skipping `avoid` as goals and as intermediate cells.
pub fn local_candidates(
    robot: &RobotState,
    priorities: &PriorityMap,
    occupancy: &OccupancyMap,
    env: &GridEnvironment,
    k: usize,
    params: &GradeParams,
    avoid: &BTreeSet<Cell>,
) -> Vec<GradedPath> {
    let mut out = Vec::new();
    for goal in priorities.cells() {
        if goal != robot.position && avoid.contains(&goal) {
            continue;
        }
        for path in yen_k_shortest_avoiding(robot.position, goal, k, occupancy, env, avoid) {
            out.push(grade_path(path, priorities, params));
        }
    }
    out
}

/// Highest grade; ties go to the shorter path, then to the earlier candidate.
pub fn best_candidate(candidates: impl IntoIterator<Item = GradedPath>) -> Option<GradedPath> {
    let mut best: Option<GradedPath> = None;
    for cand in candidates {
        let better = match &best {
            None => true,
            Some(b) => cand.grade > b.grade || (cand.grade == b.grade && cand.path.len() < b.path.len()),
        };
        if better {
            best = Some(cand);
        }
    }
    best
}

/// The robot's locally best path over its field.
pub fn plan_local(
    robot: &RobotState,
    priorities: &PriorityMap,
    occupancy: &OccupancyMap,
    env: &GridEnvironment,
    k: usize,
    params: &GradeParams,
) -> GradedPath {
    plan_local_avoiding(robot, priorities, occupancy, env, k, params, &BTreeSet::new())
}

pub fn plan_local_avoiding(
    robot: &RobotState,
    priorities: &PriorityMap,
    occupancy: &OccupancyMap,
    env: &GridEnvironment,
    k: usize,
    params: &GradeParams,
    avoid: &BTreeSet<Cell>,
) -> GradedPath {
    best_candidate(local_candidates(robot, priorities, occupancy, env, k, params, avoid))
        .unwrap_or_else(|| grade_path(Path::stay(robot.position), priorities, params))
}
