//! Scenario files (TOML) and their validation.

use std::collections::BTreeSet;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::control::{ControlParams, ControllerKind};
use crate::error::ConfigError;
use crate::optimize::SearchBudget;
use crate::pathplan::GradeParams;
use crate::sensing::{RobotState, ScanCertaintyMap, SensorSpec};
use crate::world::{Cell, GridEnvironment, HealthParams, RngStream, StreamKind, Victim};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_controller")]
    pub controller: ControllerKind,
    pub grid: GridConfig,
    #[serde(default)]
    pub victims: VictimConfig,
    pub robots: Vec<RobotConfig>,
    #[serde(default)]
    pub health: HealthConfig,
    #[serde(default)]
    pub planning: PlanningConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub certainty: CertaintyConfig,
}

fn default_controller() -> ControllerKind {
    ControllerKind::Cooperative
}

/// Inclusive rectangle of cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub min: Cell,
    pub max: Cell,
}

impl Rect {
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.min.y..=self.max.y).flat_map(move |y| (self.min.x..=self.max.x).map(move |x| Cell::new(x, y)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Cell>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacle_blocks: Vec<Rect>,
    /// Probability that any other cell is an obstacle, drawn from the layout stream.
    #[serde(default)]
    pub obstacle_density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VictimSpec {
    pub position: Cell,
    pub health: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VictimConfig {
    #[serde(default = "default_p_stay")]
    pub p_stay: f64,
    /// Victims placed at random free cells in addition to `list`.
    #[serde(default)]
    pub count: usize,
    #[serde(default = "default_health_range")]
    pub health_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub list: Vec<VictimSpec>,
}

fn default_p_stay() -> f64 {
    0.6
}

fn default_health_range() -> [f64; 2] {
    [20.0, 100.0]
}

impl Default for VictimConfig {
    fn default() -> Self {
        VictimConfig { p_stay: default_p_stay(), count: 0, health_range: default_health_range(), list: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub start: Cell,
    pub radius: f64,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HealthConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub critical: f64,
}

impl Default for HealthConfig {
    fn default() -> Self {
        HealthConfig { alpha: 0.25, beta: 1.0 / 60.0, gamma: 1.0, critical: 30.0 }
    }
}

impl HealthConfig {
    pub fn params(&self) -> HealthParams {
        HealthParams { alpha: self.alpha, beta: self.beta, gamma: self.gamma, critical: self.critical }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanningConfig {
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    pub priority_scale: f64,
    pub k_paths: usize,
    pub tau_int: usize,
    pub w1: f64,
    pub w2: f64,
    pub mpc_waypoints: usize,
}

impl Default for PlanningConfig {
    fn default() -> Self {
        PlanningConfig {
            lambda: 0.6,
            c1: 2.0,
            c2: 5.0,
            priority_scale: 10.0,
            k_paths: 3,
            tau_int: 30,
            w1: 1.0,
            w2: 0.05,
            mpc_waypoints: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub max_evaluations: usize,
    pub initial_mesh: f64,
    pub contraction: f64,
    pub min_mesh: f64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let b = SearchBudget::default();
        OptimizerConfig {
            max_evaluations: b.max_evaluations,
            initial_mesh: b.initial_mesh,
            contraction: b.contraction,
            min_mesh: b.min_mesh,
            restarts: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: Cell,
    pub max: Cell,
    pub value: f64,
}

/// Initial scan certainty: a uniform value, overridden region by region in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertaintyConfig {
    #[serde(default)]
    pub initial: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<Region>,
}

/// The concrete world a config describes for one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub env: GridEnvironment,
    pub victims: Vec<Victim>,
    pub robots: Vec<RobotState>,
    pub certainty: ScanCertaintyMap,
}

fn check(ok: bool, field: impl Into<String>, message: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(field, message))
    }
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map_or_else(|| "<file>".to_string(), |s| location(text, s.start));
            ConfigError::new(field, e.message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a scenario file. An unreadable file is a config error too.
    pub fn load(path: impl AsRef<FsPath>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn control_params(&self) -> ControlParams {
        let p = &self.planning;
        let o = &self.optimizer;
        ControlParams {
            grade: GradeParams { c1: p.c1, c2: p.c2, lambda: p.lambda, priority_scale: p.priority_scale },
            k_paths: p.k_paths,
            tau_int: p.tau_int,
            w1: p.w1,
            w2: p.w2,
            budget: SearchBudget {
                max_evaluations: o.max_evaluations,
                initial_mesh: o.initial_mesh,
                contraction: o.contraction,
                min_mesh: o.min_mesh,
            },
            restarts: o.restarts,
            mpc_waypoints: p.mpc_waypoints,
        }
    }

    /// Checks ranges and placements; errors name the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        check(g.width >= 1 && g.height >= 1, "grid", "width and height must be at least 1")?;
        let inside = |c: Cell| c.x >= 1 && c.y >= 1 && c.x as usize <= g.width && c.y as usize <= g.height;
        for (i, c) in g.obstacles.iter().enumerate() {
            check(inside(*c), format!("grid.obstacles[{i}]"), format!("{c} is outside the grid"))?;
        }
        for (i, r) in g.obstacle_blocks.iter().enumerate() {
            check(inside(r.min) && inside(r.max), format!("grid.obstacle_blocks[{i}]"), "corners must lie in the grid")?;
            check(r.min.x <= r.max.x && r.min.y <= r.max.y, format!("grid.obstacle_blocks[{i}]"), "min must not exceed max")?;
        }
        check(unit(g.obstacle_density) && g.obstacle_density < 1.0, "grid.obstacle_density", "must lie in [0, 1)")?;

        let h = &self.health;
        self.health.params().validate().map_err(|e| ConfigError::new("health", e.to_string()))?;
        check(h.alpha <= 100.0, "health.alpha", "must not exceed 100")?;

        let v = &self.victims;
        check(unit(v.p_stay), "victims.p_stay", "must lie in [0, 1]")?;
        let [lo, hi] = v.health_range;
        check(lo > 0.0 && lo <= hi && hi <= 100.0, "victims.health_range", "must satisfy 0 < low <= high <= 100")?;

        check(!self.robots.is_empty(), "robots", "at least one robot is required")?;
        let statics = self.static_obstacles();
        for (i, r) in self.robots.iter().enumerate() {
            let f = format!("robots[{i}]");
            check(inside(r.start), format!("{f}.start"), format!("{} is outside the grid", r.start))?;
            check(!statics.contains(&r.start), format!("{f}.start"), "robot starts on an obstacle")?;
            check(r.radius > 0.0 && r.radius.is_finite(), format!("{f}.radius"), "must be positive")?;
            check(r.eta > 0.0 && r.eta <= 1.0, format!("{f}.eta"), "must lie in (0, 1]")?;
        }
        for (i, s) in v.list.iter().enumerate() {
            let f = format!("victims.list[{i}]");
            check(inside(s.position), format!("{f}.position"), format!("{} is outside the grid", s.position))?;
            check(!statics.contains(&s.position), format!("{f}.position"), "victim starts on an obstacle")?;
            check(s.health > 0.0 && s.health <= 100.0, format!("{f}.health"), "must lie in (0, 100]")?;
        }
        let free = g.width * g.height - statics.len();
        check(v.list.len() + v.count + self.robots.len() <= free, "victims.count", "more victims than free cells")?;

        let p = &self.planning;
        check(unit(p.lambda) && p.lambda > 0.0, "planning.lambda", "must lie in (0, 1]")?;
        check(p.c1 >= 0.0 && p.c1.is_finite(), "planning.c1", "must be non-negative")?;
        check(p.c2 >= 0.0 && p.c2.is_finite(), "planning.c2", "must be non-negative")?;
        check(p.priority_scale > 0.0 && p.priority_scale.is_finite(), "planning.priority_scale", "must be positive")?;
        check(p.k_paths >= 1, "planning.k_paths", "must be at least 1")?;
        check(p.w1 >= 0.0 && p.w1.is_finite(), "planning.w1", "must be non-negative")?;
        check(p.w2 >= 0.0 && p.w2.is_finite(), "planning.w2", "must be non-negative")?;
        check(p.w1 + p.w2 > 0.0, "planning", "w1 and w2 cannot both be zero")?;
        check(p.mpc_waypoints >= 1, "planning.mpc_waypoints", "must be at least 1")?;

        let o = &self.optimizer;
        let budget = self.control_params().budget;
        check(budget.is_valid(), "optimizer", "need initial_mesh > 0, min_mesh > 0 and contraction in (0, 1)")?;
        check(o.restarts >= 1, "optimizer.restarts", "must be at least 1")?;

        let c = &self.certainty;
        check(unit(c.initial), "certainty.initial", "must lie in [0, 1]")?;
        for (i, r) in c.regions.iter().enumerate() {
            let f = format!("certainty.regions[{i}]");
            check(inside(r.min) && inside(r.max), f.clone(), "corners must lie in the grid")?;
            check(r.min.x <= r.max.x && r.min.y <= r.max.y, f.clone(), "min must not exceed max")?;
            check(unit(r.value), format!("{f}.value"), "must lie in [0, 1]")?;
        }
        Ok(())
    }

    fn static_obstacles(&self) -> BTreeSet<Cell> {
        let mut set: BTreeSet<Cell> = self.grid.obstacles.iter().copied().collect();
        for r in &self.grid.obstacle_blocks {
            set.extend(r.cells());
        }
        set
    }

    /// Builds the world for `seed`: listed obstacles and victims first, then
    /// random obstacles and victims from the layout stream.
    pub fn layout(&self, seed: u64) -> Layout {
        let g = &self.grid;
        let mut rng = RngStream::derive(seed, StreamKind::Layout, 0);
        let mut obstacles = self.static_obstacles();
        let reserved: BTreeSet<Cell> =
            self.robots.iter().map(|r| r.start).chain(self.victims.list.iter().map(|v| v.position)).collect();
        let probe = GridEnvironment::new(g.width, g.height, []).expect("validated grid");
        if g.obstacle_density > 0.0 {
            for c in probe.cells() {
                let u = rng.uniform();
                if u < g.obstacle_density && !reserved.contains(&c) {
                    obstacles.insert(c);
                }
            }
        }
        let env = GridEnvironment::new(g.width, g.height, obstacles.iter().copied()).expect("validated obstacles");

        let mut victims: Vec<Victim> =
            self.victims.list.iter().enumerate().map(|(i, s)| Victim::new(i, s.position, s.health)).collect();
        let mut free: Vec<Cell> = env.cells().filter(|c| !env.is_obstacle(*c) && !reserved.contains(c)).collect();
        let [lo, hi] = self.victims.health_range;
        // dense random obstacles can leave fewer free cells than requested victims
        for _ in 0..self.victims.count.min(free.len()) {
            let cell = free.swap_remove(rng.index(free.len()));
            let health = lo + (hi - lo) * rng.uniform();
            victims.push(Victim::new(victims.len(), cell, health));
        }

        let robots = self
            .robots
            .iter()
            .enumerate()
            .map(|(id, r)| RobotState { id, position: r.start, sensor: SensorSpec { radius: r.radius, eta: r.eta } })
            .collect();

        let mut certainty = ScanCertaintyMap::for_env(&env, self.certainty.initial);
        for r in &self.certainty.regions {
            for c in (Rect { min: r.min, max: r.max }).cells() {
                certainty.set_certainty(c, r.value);
            }
        }
        Layout { env, victims, robots, certainty }
    }
}

fn location(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    format!("line {line}, column {col}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "tiny"
steps = 5

[grid]
width = 6
height = 4

[[robots]]
start = [1, 1]
radius = 2.0
eta = 0.2
"#;

    #[test]
    fn minimal_file_takes_table_defaults() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.controller, ControllerKind::Cooperative);
        assert_eq!(cfg.health, HealthConfig::default());
        assert_eq!(cfg.planning.tau_int, 30);
        assert_eq!(cfg.planning.w2, 0.05);
        assert_eq!(cfg.victims.p_stay, 0.6);
        assert_eq!(cfg.optimizer.max_evaluations, 2000);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn rejects_gamma_below_beta_times_critical() {
        let text = format!("{MINIMAL}\n[health]\ngamma = 0.4\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert_eq!(err.field, "health");
        assert!(err.message.contains("gamma"));
    }

    #[test]
    fn field_paths_point_at_the_problem() {
        let bad_eta = MINIMAL.replace("eta = 0.2", "eta = 1.5");
        assert_eq!(ScenarioConfig::from_toml_str(&bad_eta).unwrap_err().field, "robots[0].eta");
        let outside = MINIMAL.replace("start = [1, 1]", "start = [7, 1]");
        assert_eq!(ScenarioConfig::from_toml_str(&outside).unwrap_err().field, "robots[0].start");
        let blocked = format!("{MINIMAL}\n[[victims.list]]\nposition = [3, 3]\nhealth = 50\n").replace(
            "height = 4",
            "height = 4\nobstacles = [[3, 3]]",
        );
        assert_eq!(ScenarioConfig::from_toml_str(&blocked).unwrap_err().field, "victims.list[0].position");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("steps = 5", "steps = 5\nspeed = 3");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert!(err.message.contains("speed"), "{err}");
        assert!(err.field.starts_with("line"));
    }

    #[test]
    fn layout_is_seeded_and_respects_reservations() {
        let text = MINIMAL.replace("height = 4", "height = 4\nobstacle_density = 0.3")
            + "\n[victims]\ncount = 5\n";
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        let a = cfg.layout(3);
        assert_eq!(a, cfg.layout(3));
        assert!(!a.env.is_obstacle(Cell::new(1, 1)));
        assert_eq!(a.victims.len(), 5);
        let cells: BTreeSet<Cell> = a.victims.iter().map(|v| v.position).collect();
        assert_eq!(cells.len(), 5);
        assert!(a.victims.iter().all(|v| !a.env.is_obstacle(v.position) && v.position != Cell::new(1, 1)));
        assert!(a.victims.iter().all(|v| (20.0..=100.0).contains(&v.health)));
    }

    #[test]
    fn certainty_regions_override_in_order() {
        let text = format!(
            "{MINIMAL}\n[certainty]\ninitial = 0.5\n[[certainty.regions]]\nmin = [1, 1]\nmax = [3, 2]\nvalue = 0.0\n[[certainty.regions]]\nmin = [3, 2]\nmax = [3, 2]\nvalue = 0.9\n"
        );
        let map = ScenarioConfig::from_toml_str(&text).unwrap().layout(0).certainty;
        assert_eq!(map.certainty(Cell::new(1, 1)), 0.0);
        assert_eq!(map.certainty(Cell::new(3, 2)), 0.9);
        assert_eq!(map.certainty(Cell::new(6, 4)), 0.5);
    }
}
