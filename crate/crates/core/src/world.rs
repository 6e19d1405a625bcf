//! Static environment, occupancy bookkeeping and the victim population.
//!
//! Cells are addressed with 1-based `(x, y)` coordinates; `x` runs along the
//! width and `y` along the height. "Row-major" order means ascending `y`, then
//! ascending `x`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::WorldError;

/// A lattice cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    /// Center-to-center Euclidean distance in cell units.
    pub fn distance(self, other: Cell) -> f64 {
        let dx = f64::from(self.x - other.x);
        let dy = f64::from(self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn chebyshev(self, other: Cell) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    /// Distinct and at most one step apart in each coordinate.
    pub fn is_adjacent(self, other: Cell) -> bool {
        self != other && self.chebyshev(other) <= 1
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<[i32; 2]> for Cell {
    fn from(v: [i32; 2]) -> Self {
        Cell::new(v[0], v[1])
    }
}

impl From<Cell> for [i32; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Dense row-major storage over the `width x height` lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid { width, height, cells: vec![value; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x >= 1 && cell.y >= 1 && cell.x as usize <= self.width && cell.y as usize <= self.height
    }

    fn index(&self, cell: Cell) -> Option<usize> {
        self.contains(cell)
            .then(|| (cell.y as usize - 1) * self.width + (cell.x as usize - 1))
    }

    pub fn get(&self, cell: Cell) -> Option<&T> {
        self.index(cell).map(|i| &self.cells[i])
    }

    pub fn get_mut(&mut self, cell: Cell) -> Option<&mut T> {
        self.index(cell).map(move |i| &mut self.cells[i])
    }

    pub fn values(&self) -> &[T] {
        &self.cells
    }

    /// Rows in ascending `y`, each row in ascending `x`.
    pub fn rows(&self) -> Vec<Vec<T>> {
        self.cells.chunks(self.width).map(|r| r.to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid { width: self.width, height: self.height, cells: self.cells.iter().map(f).collect() }
    }
}

/// The bounded lattice and its static obstacles.
#[derive(Clone, Debug, PartialEq)]
pub struct GridEnvironment {
    width: usize,
    height: usize,
    blocked: Grid<bool>,
}

impl GridEnvironment {
    pub fn new(width: usize, height: usize, obstacles: impl IntoIterator<Item = Cell>) -> Result<Self, WorldError> {
        if width == 0 || height == 0 {
            return Err(WorldError::EmptyGrid { width, height });
        }
        let mut blocked = Grid::filled(width, height, false);
        for cell in obstacles {
            match blocked.get_mut(cell) {
                Some(b) => *b = true,
                None => return Err(WorldError::OutsideGrid(cell)),
            }
        }
        Ok(GridEnvironment { width, height, blocked })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.blocked.contains(cell)
    }

    pub fn is_obstacle(&self, cell: Cell) -> bool {
        self.blocked.get(cell).copied().unwrap_or(false)
    }

    pub fn obstacles(&self) -> Vec<Cell> {
        self.cells().filter(|&c| self.is_obstacle(c)).collect()
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (1..=self.height as i32).flat_map(move |y| (1..=self.width as i32).map(move |x| Cell::new(x, y)))
    }

    /// In-grid Moore neighbours of `cell`, row-major, regardless of obstacles.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        (-1..=1).flat_map(move |dy| {
            (-1..=1).filter_map(move |dx| {
                let n = Cell::new(cell.x + dx, cell.y + dy);
                ((dx, dy) != (0, 0) && self.contains(n)).then_some(n)
            })
        })
    }
}

/// 8-connected neighbours that are inside the grid and not obstacles, row-major.
pub fn free_neighbors(env: &GridEnvironment, cell: Cell) -> Result<Vec<Cell>, WorldError> {
    if !env.contains(cell) {
        return Err(WorldError::OutsideGrid(cell));
    }
    Ok(env.neighbors(cell).filter(|&n| !env.is_obstacle(n)).collect())
}

/// Obstacles discovered so far.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OccupancyMap {
    known: BTreeSet<Cell>,
}

impl OccupancyMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_known_obstacle(&self, cell: Cell) -> bool {
        self.known.contains(&cell)
    }

    /// Registers every true obstacle among `cells`. Free cells are ignored, so
    /// the map never holds a false positive.
    pub fn register<'a>(&mut self, env: &GridEnvironment, cells: impl IntoIterator<Item = &'a Cell>) -> usize {
        let before = self.known.len();
        self.known.extend(cells.into_iter().copied().filter(|&c| env.is_obstacle(c)));
        self.known.len() - before
    }

    pub fn known(&self) -> impl Iterator<Item = Cell> + '_ {
        self.known.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.known.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty()
    }

    /// `env`-sized grid, 1 for known obstacles.
    pub fn to_grid(&self, env: &GridEnvironment) -> Grid<u8> {
        let mut g = Grid::filled(env.width(), env.height(), 0u8);
        for &c in &self.known {
            if let Some(v) = g.get_mut(c) {
                *v = 1;
            }
        }
        g
    }
}

pub type VictimId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub robot: usize,
    pub tick: usize,
    pub health: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Victim {
    pub id: VictimId,
    pub position: Cell,
    pub health: f64,
    pub alive: bool,
    pub detection: Option<DetectionRecord>,
}

impl Victim {
    pub fn new(id: VictimId, position: Cell, health: f64) -> Self {
        let health = health.clamp(0.0, 100.0);
        Victim { id, position, health, alive: health > 0.0, detection: None }
    }
}

/// Health dynamics parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HealthParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub critical: f64,
}

impl HealthParams {
    pub fn validate(&self) -> Result<(), WorldError> {
        let HealthParams { alpha, beta, gamma, critical } = *self;
        if !(alpha > 0.0 && beta > 0.0 && gamma > 0.0) {
            return Err(WorldError::HealthParams("alpha, beta and gamma must be positive".into()));
        }
        if !(0.0..=100.0).contains(&critical) {
            return Err(WorldError::HealthParams("critical health must lie in [0, 100]".into()));
        }
        if gamma < beta * critical {
            return Err(WorldError::HealthParams(format!(
                "gamma ({gamma}) must be at least beta * h_crit ({})",
                beta * critical
            )));
        }
        Ok(())
    }

    /// Per-tick health change. `h == critical` takes the uniform-decay branch.
    pub fn delta(&self, health: f64) -> f64 {
        if health >= self.critical {
            -self.alpha
        } else {
            self.beta * health - self.gamma
        }
    }
}

pub fn step_health(victim: &Victim, params: &HealthParams) -> Victim {
    let mut next = victim.clone();
    if !victim.alive {
        return next;
    }
    next.health = (victim.health + params.delta(victim.health)).max(0.0);
    next.alive = next.health > 0.0;
    next
}

/// Random walk: stay with probability `p_stay`, otherwise pick one of the
/// free neighbours uniformly. Deceased victims do not move.
pub fn step_victim_motion(env: &GridEnvironment, victim: &Victim, p_stay: f64, rng: &mut RngStream) -> Victim {
    let mut next = victim.clone();
    if !victim.alive {
        return next;
    }
    let u = rng.uniform();
    if u < p_stay {
        return next;
    }
    let free = free_neighbors(env, victim.position).unwrap_or_default();
    if free.is_empty() {
        return next;
    }
    let scaled = (u - p_stay) / (1.0 - p_stay) * free.len() as f64;
    next.position = free[(scaled as usize).min(free.len() - 1)];
    next
}

/// Seeded generator owned by one stochastic actor.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

/// Tags that keep the derived streams of different actor kinds apart.
#[derive(Clone, Copy, Debug)]
pub enum StreamKind {
    Layout = 1,
    Victim = 2,
    Robot = 3,
    Optimizer = 4,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for actor `index` of the given kind.
    pub fn derive(master: u64, kind: StreamKind, index: u64) -> Self {
        let mut s = splitmix64(master ^ splitmix64(kind as u64));
        s = splitmix64(s ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)));
        RngStream::new(s)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
