//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach stdout.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::process::{Command, ExitCode};
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use sarsim::control::ControllerKind;
use sarsim::fuzzy::{PriorityMap, RuleBase};
use sarsim::pathplan::{
    astar_shortest, exploration_degree, grade, local_candidates, plan_local, yen_k_shortest, GradeParams, Path,
};
use sarsim::sensing::{uncertainty_ratio, update_scan_certainty, RobotState, ScanCertaintyMap, SensorSpec};
use sarsim::sim::{run_batch, run_scenario_with, RunOptions, RunRecord, ScenarioConfig, RUN_COLUMNS, VICTIM_COLUMNS};
use sarsim::world::{step_health, Cell, GridEnvironment, HealthParams, OccupancyMap, RngStream, Victim};

use common::{load, scenario_path, small_scenario, with_controller, ALL_CONTROLLERS};

const CASES: u32 = 1000;
const NO_TIMING: RunOptions = RunOptions { timing: false };

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Check { name, ok, detail: detail.into() }
    }
}

fn prop_check<S: Strategy>(name: &'static str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    match runner.run(&strategy, test) {
        Ok(()) => Check::new(name, true, format!("{CASES} cases")),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

fn run(cfg: &ScenarioConfig) -> RunRecord {
    run_scenario_with(cfg, NO_TIMING).expect("scenario runs")
}

fn robot_strategy(w: i32, h: i32) -> impl Strategy<Value = RobotState> {
    (1..=w, 1..=h, 0.5f64..6.0, 0.01f64..=1.0)
        .prop_map(|(x, y, radius, eta)| RobotState { id: 0, position: Cell::new(x, y), sensor: SensorSpec { radius, eta } })
}

// ---- criterion 1 ----------------------------------------------------------

fn criterion_1() -> Vec<Check> {
    let scan = prop_check(
        "scan certainty monotone, sigma in (0,1]",
        (
            prop::collection::vec(0.0f64..=1.0, 64),
            prop::collection::vec(robot_strategy(8, 8), 1..=4),
        ),
        |(cells, robots)| {
            let env = GridEnvironment::new(8, 8, []).unwrap();
            let mut map = ScanCertaintyMap::for_env(&env, 0.0);
            for (c, v) in env.cells().zip(&cells) {
                map.set_certainty(c, *v);
            }
            let before = map.clone();
            update_scan_certainty(&mut map, &robots);
            for c in env.cells() {
                let s = uncertainty_ratio(c, &robots);
                prop_assert!(s > 0.0 && s <= 1.0, "sigma {s} at {c}");
                prop_assert!(map.certainty(c) >= before.certainty(c));
            }
            Ok(())
        },
    );

    let health = prop_check(
        "health non-increasing, clamped at 0",
        (0.0f64..=100.0, 0.01f64..2.0, 0.0f64..0.05, 1.0f64..60.0, 1usize..200),
        |(h0, alpha, beta, critical, ticks)| {
            let params = HealthParams { alpha, beta, gamma: (beta * critical).max(0.5) + 0.1, critical };
            params.validate().map_err(|e| TestCaseError::fail(e.to_string()))?;
            let mut v = Victim::new(0, Cell::new(1, 1), h0);
            for _ in 0..ticks {
                let next = step_health(&v, &params);
                prop_assert!(next.health <= v.health && next.health >= 0.0);
                prop_assert!(next.alive == (next.health > 0.0));
                v = next;
            }
            Ok(())
        },
    );

    let paths = prop_check("executed moves are valid for every controller", small_scenario(&ALL_CONTROLLERS), |cfg| {
        let record = run(&cfg);
        let env = GridEnvironment::new(cfg.grid.width, cfg.grid.height, record.obstacles.iter().copied()).unwrap();
        for traj in &record.trajectories {
            prop_assert_eq!(traj.len(), cfg.steps + 1);
            for pair in traj.windows(2) {
                prop_assert!(env.contains(pair[1]) && !env.is_obstacle(pair[1]), "{} lands off the free grid", pair[1]);
                prop_assert!(pair[0] == pair[1] || pair[0].is_adjacent(pair[1]), "jump {} -> {}", pair[0], pair[1]);
            }
        }
        Ok(())
    });

    const SUPERVISED: [ControllerKind; 2] = [ControllerKind::Cooperative, ControllerKind::PureMpc];
    let supervisor = prop_check("supervisor J_out >= J_in on every call", small_scenario(&SUPERVISED), |mut cfg| {
        // pull every robot next to the first so fields overlap
        let anchor = cfg.robots[0].start;
        for r in cfg.robots.iter_mut().skip(1) {
            r.start = anchor;
        }
        cfg.planning.tau_int = 1;
        let record = run(&cfg);
        for call in &record.supervisor_log {
            prop_assert!(call.value >= call.warm_value, "tick {}: {} < {}", call.tick, call.value, call.warm_value);
        }
        Ok(())
    });

    let determinism = prop_check("same seed gives a byte-identical record", small_scenario(&ALL_CONTROLLERS), |cfg| {
        prop_assert_eq!(run(&cfg).to_json(), run(&cfg).to_json());
        Ok(())
    });

    vec![scan, health, paths, supervisor, determinism]
}

// ---- criterion 2 ----------------------------------------------------------

/// Scan update written out directly, robot order as given.
fn reference_certainty(c: f64, cell: Cell, robots: &[RobotState]) -> f64 {
    let mut sigma = 1.0;
    for r in robots {
        let dist = (((cell.x - r.position.x).pow(2) + (cell.y - r.position.y).pow(2)) as f64).sqrt();
        let inside = if dist < r.sensor.radius { 1.0 } else { 0.0 };
        sigma *= 1.0 - (1.0 - r.sensor.eta) * (-dist).exp() * inside;
    }
    1.0 - sigma * (1.0 - c)
}

/// Aggregated Mamdani output integrated at 10^5 midpoints.
fn centroid_oracle(rb: &RuleBase, e: f64, h: f64, c: f64) -> f64 {
    let term = |var: &sarsim::fuzzy::LinguisticVariable, i: usize, x: f64| var.terms[i].1.membership(var.clamp(x));
    let strengths: Vec<f64> = rb
        .rules
        .iter()
        .map(|r| term(&rb.evidence, r.evidence, e).min(term(&rb.health, r.health, h)).min(term(&rb.certainty, r.certainty, c)))
        .collect();
    let n = 100_000;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        let x = (k as f64 + 0.5) / n as f64;
        let mu = rb
            .rules
            .iter()
            .zip(&strengths)
            .map(|(r, s)| rb.priority.terms[r.priority].1.membership(x).min(*s))
            .fold(0.0, f64::max);
        num += x * mu;
        den += mu;
    }
    num / den
}

fn criterion_2() -> Vec<Check> {
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let worst = std::cell::Cell::new(0.0f64);
    let strategy = (1..=12i32, 1..=12i32, 0.0f64..=1.0, prop::collection::vec(robot_strategy(12, 12), 1..=4));
    let result = runner.run(&strategy, |(x, y, c, robots)| {
        let env = GridEnvironment::new(12, 12, []).unwrap();
        let cell = Cell::new(x, y);
        let mut map = ScanCertaintyMap::for_env(&env, 0.0);
        map.set_certainty(cell, c);
        update_scan_certainty(&mut map, &robots);
        let err = (map.certainty(cell) - reference_certainty(c, cell, &robots)).abs();
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-12, "error {err}");
        Ok(())
    });
    let dynamics = Check::new(
        "sigma/z/c match direct formulas on 10^4 states",
        result.is_ok(),
        format!("max abs error {:.2e} (tol 1e-12)", worst.get()),
    );

    let mut pm = PriorityMap::new();
    let cells = [Cell::new(1, 1), Cell::new(2, 2), Cell::new(3, 3)];
    for c in cells {
        pm.insert(c, 1.0);
    }
    let path = Path::from_cells(cells.to_vec());
    let eps = exploration_degree(&path, &pm, 0.6);
    let g = grade(path.len(), eps, 2.0, 5.0);
    let mut rng = RngStream::new(99);
    let mut grade_ok = (g - 3.8).abs() < 1e-12;
    for _ in 0..1000 {
        let len = 1 + rng.index(8);
        let mut pm = PriorityMap::new();
        let cells: Vec<Cell> = (0..len as i32).map(|i| Cell::new(1 + i, 1)).collect();
        let rho: Vec<f64> = cells.iter().map(|_| rng.uniform()).collect();
        for (c, r) in cells.iter().zip(&rho) {
            pm.insert(*c, *r);
        }
        let lambda = 0.05 + 0.95 * rng.uniform();
        let direct: f64 = rho.iter().enumerate().map(|(k, r)| lambda.powi(k as i32) * r).sum();
        let e = exploration_degree(&Path::from_cells(cells), &pm, lambda);
        grade_ok &= (e - direct).abs() < 1e-12 && (grade(len, e, 2.0, 5.0) - (-2.0 * len as f64 + 5.0 * direct)).abs() < 1e-12;
    }
    let grades = Check::new("exploration degree and grade match direct sums", grade_ok, format!("rho=[1,1,1] gives g = {g:.6}"));

    let rb = RuleBase::standard();
    let mut rng = RngStream::new(7);
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let (e, h, c) = (rng.uniform(), 100.0 * rng.uniform(), rng.uniform());
        let got = rb.infer(e, h, c).expect("complete rule base fires");
        worst = worst.max((got - centroid_oracle(&rb, e, h, c)).abs());
    }
    let centroid = Check::new("fuzzy centroid vs 10^5-point integration", worst <= 1e-3, format!("max abs error {worst:.2e} (tol 1e-3)"));
    vec![dynamics, grades, centroid]
}

// ---- criterion 3 ----------------------------------------------------------

fn bfs_len(origin: Cell, goal: Cell, env: &GridEnvironment) -> Option<usize> {
    let mut seen = BTreeSet::from([origin]);
    let mut queue = VecDeque::from([(origin, 1usize)]);
    while let Some((c, d)) = queue.pop_front() {
        if c == goal {
            return Some(d);
        }
        for n in env.neighbors(c) {
            if !env.is_obstacle(n) && seen.insert(n) {
                queue.push_back((n, d + 1));
            }
        }
    }
    None
}

/// Every loopless path from `origin` to `goal` with at most `max_len` cells.
fn enumerate_paths(origin: Cell, goal: Cell, env: &GridEnvironment, max_len: usize) -> Vec<Vec<Cell>> {
    fn dfs(path: &mut Vec<Cell>, goal: Cell, env: &GridEnvironment, max_len: usize, out: &mut Vec<Vec<Cell>>) {
        let here = *path.last().unwrap();
        if here == goal {
            out.push(path.clone());
            return;
        }
        if path.len() == max_len {
            return;
        }
        for n in env.neighbors(here) {
            if !env.is_obstacle(n) && !path.contains(&n) {
                path.push(n);
                dfs(path, goal, env, max_len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(&mut vec![origin], goal, env, max_len, &mut out);
    out
}

fn random_map(rng: &mut RngStream) -> (GridEnvironment, OccupancyMap, Cell, Cell) {
    loop {
        let obstacles: Vec<Cell> =
            (1..=6).flat_map(|y| (1..=6).map(move |x| Cell::new(x, y))).filter(|_| rng.uniform() < 0.25).collect();
        let env = GridEnvironment::new(6, 6, obstacles).unwrap();
        let free: Vec<Cell> = env.cells().filter(|c| !env.is_obstacle(*c)).collect();
        if free.len() < 2 {
            continue;
        }
        let a = free[rng.index(free.len())];
        let b = free[rng.index(free.len())];
        let mut occ = OccupancyMap::new();
        let all: Vec<Cell> = env.cells().collect();
        occ.register(&env, &all);
        return (env, occ, a, b);
    }
}

fn criterion_3() -> Vec<Check> {
    let mut rng = RngStream::new(2024);
    let (mut astar_ok, mut yen_ok, mut local_ok) = (true, true, true);
    let mut notes = Vec::new();
    for map in 0..50 {
        let (env, occ, a, b) = random_map(&mut rng);
        let bfs = bfs_len(a, b, &env);
        let astar = astar_shortest(a, b, &occ, &env).ok().map(|p| p.len());
        if astar != bfs {
            astar_ok = false;
            notes.push(format!("map {map}: A* {astar:?} vs BFS {bfs:?}"));
        }

        let k = 3;
        let yen = yen_k_shortest(a, b, k, &occ, &env);
        if let Some(last) = yen.last() {
            let mut all = enumerate_paths(a, b, &env, last.len());
            all.sort_by_key(Vec::len);
            let expected: Vec<usize> = all.iter().take(k).map(Vec::len).collect();
            let got: Vec<usize> = yen.iter().map(Path::len).collect();
            let members = yen.iter().all(|p| all.iter().any(|q| q.as_slice() == p.cells()));
            if got != expected || !members {
                yen_ok = false;
                notes.push(format!("map {map}: Yen lengths {got:?} vs enumerated {expected:?}"));
            }
        } else if bfs.is_some() {
            yen_ok = false;
        }

        let robot = RobotState { id: 0, position: a, sensor: SensorSpec { radius: 3.0, eta: 0.2 } };
        let mut pm = PriorityMap::new();
        for c in env.cells().filter(|c| c.distance(a) < 3.0 && !env.is_obstacle(*c)) {
            pm.insert(c, rng.uniform());
        }
        let params = GradeParams { c1: 2.0, c2: 5.0, lambda: 0.6, priority_scale: 10.0 };
        let chosen = plan_local(&robot, &pm, &occ, &env, k, &params);
        let best = local_candidates(&robot, &pm, &occ, &env, k, &params, &BTreeSet::new())
            .iter()
            .map(|g| {
                let eps: f64 = g.path.cells().iter().enumerate().map(|(i, c)| 0.6f64.powi(i as i32) * pm.value(*c)).sum();
                -2.0 * g.path.len() as f64 + 5.0 * 10.0 * eps
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if (chosen.grade - best).abs() > 1e-9 {
            local_ok = false;
            notes.push(format!("map {map}: plan_local {} vs brute force {best}", chosen.grade));
        }
    }
    let note = |ok: bool| if ok { "50 maps".to_string() } else { notes.join("; ") };
    vec![
        Check::new("A* length equals BFS on 50 random 6x6 maps", astar_ok, note(astar_ok)),
        Check::new("Yen top-3 are the shortest enumerated loopless paths", yen_ok, note(yen_ok)),
        Check::new("plan_local grade equals brute-force maximum", local_ok, note(local_ok)),
    ]
}

// ---- criterion 4 ----------------------------------------------------------

fn pair(name: &str) -> (ScenarioConfig, RunRecord, RunRecord) {
    let cfg = load(name);
    let coop = run(&with_controller(&cfg, ControllerKind::Cooperative));
    let selfish = run(&with_controller(&cfg, ControllerKind::Selfish));
    (cfg, coop, selfish)
}

fn detected(r: &RunRecord) -> Vec<bool> {
    r.victims.iter().map(|v| v.detection.is_some()).collect()
}

fn coverage(r: &RunRecord) -> (f64, f64) {
    (r.ticks[0].coverage_pct, r.ticks.last().unwrap().coverage_pct)
}

/// Final coverage of `a` over `b`, and the ratio of their gains since tick 0.
fn coverage_ratios(a: &RunRecord, b: &RunRecord) -> (f64, f64) {
    let ((a0, a1), (b0, b1)) = (coverage(a), coverage(b));
    (a1 / b1, (a1 - a0) / (b1 - b0))
}

fn criterion_4() -> Vec<Check> {
    let (_, coop, selfish) = pair("case1");
    let (dc, ds) = (detected(&coop), detected(&selfish));
    let case1 = Check::new(
        "case 1: cooperative finds both victims, selfish misses v2",
        dc == [true, true] && coop.victims.iter().all(|v| v.detection.is_some_and(|d| d.tick <= 9)) && ds[0] && !ds[1],
        format!("cooperative {dc:?}, selfish {ds:?}"),
    );

    let (_, coop, selfish) = pair("case2");
    let (final_ratio, gain_ratio) = coverage_ratios(&coop, &selfish);
    let case2 = Check::new(
        "case 2: cooperative coverage above selfish, gain ratio >= 1.3",
        final_ratio > 1.0 && gain_ratio >= 1.3,
        format!("final ratio {final_ratio:.3}, gain ratio {gain_ratio:.2}"),
    );

    let (_, coop, selfish) = pair("case3");
    let (dc, ds) = (detected(&coop), detected(&selfish));
    let case3 = Check::new(
        "case 3: cooperative finds both victims, selfish only v1",
        dc == [true, true] && ds == [true, false],
        format!("cooperative {dc:?}, selfish {ds:?}"),
    );

    let (cfg, coop, selfish) = pair("case4");
    let unknown = cfg.certainty.regions.iter().find(|r| r.value == 0.0).expect("case 4 has an unknown sub-area");
    let inside = |c: &Cell| (unknown.min.x..=unknown.max.x).contains(&c.x) && (unknown.min.y..=unknown.max.y).contains(&c.y);
    let accurate = cfg.robots.iter().enumerate().min_by(|a, b| a.1.eta.total_cmp(&b.1.eta)).unwrap().0;
    let sent = coop.trajectories[accurate].iter().any(inside);
    let (final_ratio, gain_ratio) = coverage_ratios(&coop, &selfish);
    let case4 = Check::new(
        "case 4: accurate robot sent to the unknown sub-area, gain >= 10%",
        sent && final_ratio > 1.0 && gain_ratio >= 1.1,
        format!("robot {accurate} enters: {sent}, final ratio {final_ratio:.3}, gain ratio {gain_ratio:.2}"),
    );

    let (_, coop, selfish) = pair("case5");
    let found = detected(&coop).iter().filter(|d| **d).count();
    let deceased = coop.victims.iter().filter(|v| !v.alive).count();
    let selfish_found = detected(&selfish).iter().filter(|d| **d).count();
    let case5 = Check::new(
        "case 5: cooperative finds >= 5 of 6 with none deceased, selfish <= 2",
        found >= 5 && deceased == 0 && selfish_found <= 2,
        format!("cooperative {found} found / {deceased} deceased, selfish {selfish_found} found"),
    );
    vec![case1, case2, case3, case4, case5]
}

// ---- criterion 5 ----------------------------------------------------------

fn criterion_5() -> Vec<Check> {
    let cfg = load("general");
    let batch = run_batch(&cfg, &ALL_CONTROLLERS, 1..=20, NO_TIMING).expect("batch runs");
    let get = |k| batch.aggregate(k).expect("controller in batch");
    let [coop, selfish, pure, acs, exh] = ALL_CONTROLLERS.map(get);
    const RISE_80: usize = 2;

    let cov = |a: &sarsim::sim::AggregateRow| a.final_coverage_mean;
    let top = cov(selfish).min(cov(coop)).min(cov(acs));
    let coverage = Check::new(
        "coverage: exhaustive < pure MPC < {selfish, coop, ACS}, ACS >= coop",
        cov(exh) < cov(pure) && cov(pure) < top && cov(acs) >= cov(coop),
        format!(
            "exh {:.2} pure {:.2} selfish {:.2} coop {:.2} acs {:.2}",
            cov(exh),
            cov(pure),
            cov(selfish),
            cov(coop),
            cov(acs)
        ),
    );
    let f = |a: &sarsim::sim::AggregateRow| a.victims_found_mean;
    let victims = Check::new(
        "victims found: coop, selfish >= pure MPC > ACS >= exhaustive",
        f(coop).min(f(selfish)) >= f(pure) && f(pure) > f(acs) && f(acs) >= f(exh),
        format!("coop {:.2} selfish {:.2} pure {:.2} acs {:.2} exh {:.2}", f(coop), f(selfish), f(pure), f(acs), f(exh)),
    );
    let rise = Check::new(
        "mean ticks to 80% coverage: coop < selfish",
        coop.rise_time_mean[RISE_80] < selfish.rise_time_mean[RISE_80],
        format!("coop {:.2} selfish {:.2}", coop.rise_time_mean[RISE_80], selfish.rise_time_mean[RISE_80]),
    );
    let conflicts = Check::new(
        "conflict events: coop < selfish",
        coop.conflicts_mean < selfish.conflicts_mean,
        format!("coop {:.2} selfish {:.2}", coop.conflicts_mean, selfish.conflicts_mean),
    );
    let evals = Check::new(
        "objective evaluations per tick: coop < pure MPC",
        coop.objective_evals_mean < pure.objective_evals_mean,
        format!("coop {:.1} pure {:.1}", coop.objective_evals_mean, pure.objective_evals_mean),
    );
    vec![coverage, victims, rise, conflicts, evals]
}

// ---- criterion 6 ----------------------------------------------------------

fn sarsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sarsim"))
}

fn golden(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).expect("golden file present")
}

fn criterion_6() -> Vec<Check> {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[health]\ngamma = 0.1\n\n[[robots]]\nstart = [1, 1]\nradius = 2.0\neta = 0.5\n").unwrap();
    let status = sarsim().args(["validate", "--scenario"]).arg(&bad).output().unwrap().status;
    let good = sarsim().args(["validate", "--scenario"]).arg(scenario_path("case1")).output().unwrap().status;
    let validate = Check::new(
        "validate exits 2 on gamma < beta * h_crit, 0 on a valid file",
        status.code() == Some(2) && good.code() == Some(0),
        format!("bad {:?}, good {:?}", status.code(), good.code()),
    );

    let out = dir.path().join("out");
    let ran = sarsim()
        .args(["run", "--no-timing", "--seed", "1", "--controller", "cooperative", "--scenario"])
        .arg(scenario_path("case1"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let read = |f: &str| std::fs::read_to_string(out.join(f)).unwrap_or_default();
    let (runs, victims) = (read("case1_cooperative_1.csv"), read("case1_cooperative_1_victims.csv"));
    let header = |s: &str| s.lines().next().unwrap_or_default().to_string();
    let columns = Check::new(
        "CSV column contract",
        ran.status.success() && header(&runs) == RUN_COLUMNS.join(",") && header(&victims) == VICTIM_COLUMNS.join(","),
        format!("run header `{}`", header(&runs)),
    );
    let golden_ok = runs == golden("case1_cooperative_1.csv") && victims == golden("case1_cooperative_1_victims.csv");
    let golden = Check::new("golden case 1 run (seed 1, no timing)", golden_ok, "tests/golden/case1_cooperative_1*.csv");
    vec![validate, columns, golden]
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Vec<Check>); 6] = [
        (1, "invariant suite", criterion_1),
        (2, "numeric oracles", criterion_2),
        (3, "path-planning oracles", criterion_3),
        (4, "structured cases", criterion_4),
        (5, "batch directional study", criterion_5),
        (6, "CLI and formats", criterion_6),
    ];
    let mut failed = 0;
    for (n, title, f) in criteria {
        let started = Instant::now();
        let checks = f();
        let ok = checks.iter().all(|c| c.ok);
        failed += usize::from(!ok);
        println!(
            "criterion {n} ({title}): {} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        for c in &checks {
            println!("    {} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 6 criteria failed");
        ExitCode::FAILURE
    }
}
