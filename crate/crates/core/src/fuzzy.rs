//! Mamdani inference of per-cell search priorities.
//!
//! Three inputs (victim evidence, victim health, scan certainty), one output
//! (priority in `[0, 1]`). Conjunction is `min`, each rule clips its
//! consequent, clipped sets are aggregated with `max`, and the result is
//! defuzzified by its centroid over a uniform grid on the output universe.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::FuzzyError;
use crate::sensing::{victim_evidence, LocalVictimMap, RobotState, ScanCertaintyMap, VictimObservation};
use crate::world::{Cell, OccupancyMap};

/// Number of samples used for centroid defuzzification.
pub const OUTPUT_SAMPLES: usize = 1001;

/// Health fed to the rule base for cells without an observed victim.
pub const NO_VICTIM_HEALTH: f64 = 100.0;

const DEFAULT_RULES: &str = include_str!("../assets/fuzzy_rules.txt");

/// The reference rule table: (evidence, health, certainty) -> priority.
pub const REFERENCE_RULES: [[&str; 4]; 27] = [
    ["low", "stable", "known", "very_low"],
    ["low", "medium", "known", "very_low"],
    ["low", "stable", "partial", "very_low"],
    ["low", "medium", "partial", "low"],
    ["low", "critical", "known", "low"],
    ["medium", "medium", "partial", "low"],
    ["medium", "critical", "known", "low"],
    ["low", "stable", "unknown", "low"],
    ["medium", "stable", "known", "medium"],
    ["medium", "medium", "known", "medium"],
    ["medium", "stable", "partial", "medium"],
    ["high", "stable", "partial", "medium"],
    ["high", "medium", "known", "medium"],
    ["high", "critical", "known", "medium"],
    ["low", "critical", "partial", "medium"],
    ["low", "medium", "unknown", "medium"],
    ["high", "stable", "known", "high"],
    ["medium", "stable", "unknown", "high"],
    ["medium", "medium", "unknown", "high"],
    ["high", "stable", "unknown", "high"],
    ["low", "critical", "unknown", "high"],
    ["medium", "critical", "partial", "very_high"],
    ["high", "medium", "partial", "very_high"],
    ["medium", "critical", "unknown", "very_high"],
    ["high", "medium", "unknown", "very_high"],
    ["high", "critical", "partial", "very_high"],
    ["high", "critical", "unknown", "very_high"],
];

/// Trapezoid with feet `a`, `d` and shoulders `b`, `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapezoidMF {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TrapezoidMF {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        if !(a <= b && b <= c && c <= d) || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(FuzzyError::Membership {
                name: format!("({a}, {b}, {c}, {d})"),
                message: "expected finite a <= b <= c <= d".into(),
            });
        }
        Ok(TrapezoidMF { a, b, c, d })
    }

    /// Degree of membership; vertical edges behave as crisp steps.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a || x > self.d {
            0.0
        } else if x >= self.b && x <= self.c {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinguisticVariable {
    pub name: String,
    pub universe: (f64, f64),
    pub terms: Vec<(String, TrapezoidMF)>,
}

impl LinguisticVariable {
    pub fn term_index(&self, term: &str) -> Result<usize, FuzzyError> {
        self.terms.iter().position(|(n, _)| n == term).ok_or_else(|| FuzzyError::UnknownTerm {
            variable: self.name.clone(),
            term: term.to_string(),
        })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.universe.0, self.universe.1)
    }

    fn degrees(&self, x: f64) -> Vec<f64> {
        let x = self.clamp(x);
        self.terms.iter().map(|(_, mf)| mf.membership(x)).collect()
    }
}

/// One rule, as term indices into the rule base's variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzyRule {
    pub evidence: usize,
    pub health: usize,
    pub certainty: usize,
    pub priority: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleBase {
    pub evidence: LinguisticVariable,
    pub health: LinguisticVariable,
    pub certainty: LinguisticVariable,
    pub priority: LinguisticVariable,
    pub rules: Vec<FuzzyRule>,
    /// Output grid and each output term sampled on it.
    samples: Vec<f64>,
    sampled_terms: Vec<Vec<f64>>,
}

impl RuleBase {
    /// The bundled rule base.
    pub fn standard() -> Self {
        DEFAULT_RULES.parse().expect("bundled rule base is valid")
    }

    pub fn new(
        evidence: LinguisticVariable,
        health: LinguisticVariable,
        certainty: LinguisticVariable,
        priority: LinguisticVariable,
        rules: Vec<FuzzyRule>,
    ) -> Result<Self, FuzzyError> {
        let inputs = [&evidence, &health, &certainty];
        if let Some(v) = inputs.iter().find(|v| v.terms.len() != 3) {
            return Err(FuzzyError::IncompleteRuleBase(format!("variable `{}` must have 3 terms", v.name)));
        }
        let mut seen = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            if r.evidence >= 3 || r.health >= 3 || r.certainty >= 3 || r.priority >= priority.terms.len() {
                return Err(FuzzyError::IncompleteRuleBase(format!("rule {} references a missing term", i + 1)));
            }
            if let Some(first) = seen.insert((r.evidence, r.health, r.certainty), i) {
                return Err(FuzzyError::IncompleteRuleBase(format!(
                    "rules {} and {} share an antecedent",
                    first + 1,
                    i + 1
                )));
            }
        }
        if seen.len() != 27 {
            return Err(FuzzyError::IncompleteRuleBase(format!("{} of 27 antecedents covered", seen.len())));
        }
        let (lo, hi) = priority.universe;
        let samples: Vec<f64> =
            (0..OUTPUT_SAMPLES).map(|k| lo + (hi - lo) * k as f64 / (OUTPUT_SAMPLES - 1) as f64).collect();
        let sampled_terms =
            priority.terms.iter().map(|(_, mf)| samples.iter().map(|&x| mf.membership(x)).collect()).collect();
        Ok(RuleBase { evidence, health, certainty, priority, rules, samples, sampled_terms })
    }

    /// True when the rules are exactly the reference table.
    pub fn matches_reference(&self) -> bool {
        self.rules.len() == REFERENCE_RULES.len()
            && self.rules.iter().zip(REFERENCE_RULES.iter()).all(|(r, row)| {
                self.evidence.terms[r.evidence].0 == row[0]
                    && self.health.terms[r.health].0 == row[1]
                    && self.certainty.terms[r.certainty].0 == row[2]
                    && self.priority.terms[r.priority].0 == row[3]
            })
    }

    /// Firing strength of every rule.
    pub fn firing_strengths(&self, evidence: f64, health: f64, certainty: f64) -> Vec<f64> {
        let e = self.evidence.degrees(evidence);
        let h = self.health.degrees(health);
        let c = self.certainty.degrees(certainty);
        self.rules.iter().map(|r| e[r.evidence].min(h[r.health]).min(c[r.certainty])).collect()
    }

    /// Centroid of the aggregated output set for the given clip level per output term.
    pub fn defuzzify(&self, clip: &[f64]) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, &x) in self.samples.iter().enumerate() {
            let mu = clip
                .iter()
                .zip(&self.sampled_terms)
                .map(|(&level, term)| level.min(term[k]))
                .fold(0.0, f64::max);
            num += x * mu;
            den += mu;
        }
        (den > 0.0).then(|| num / den)
    }

    pub fn infer(&self, evidence: f64, health: f64, certainty: f64) -> Result<f64, FuzzyError> {
        let strengths = self.firing_strengths(evidence, health, certainty);
        let mut clip = vec![0.0f64; self.priority.terms.len()];
        for (rule, s) in self.rules.iter().zip(&strengths) {
            clip[rule.priority] = clip[rule.priority].max(*s);
        }
        self.defuzzify(&clip).ok_or(FuzzyError::NoRuleFired { evidence, health, certainty })
    }
}

impl FromStr for RuleBase {
    type Err = FuzzyError;

    fn from_str(text: &str) -> Result<Self, FuzzyError> {
        let mut vars: BTreeMap<String, LinguisticVariable> = BTreeMap::new();
        let mut raw_rules: Vec<(usize, [String; 4])> = Vec::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: &str| FuzzyError::Parse { line: line_no, message: message.to_string() };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let parts: Vec<&str> = header.split_whitespace().collect();
                match parts.as_slice() {
                    ["rules"] => section = Some("rules".into()),
                    [name, lo, hi] => {
                        let lo: f64 = lo.parse().map_err(|_| err("bad universe bound"))?;
                        let hi: f64 = hi.parse().map_err(|_| err("bad universe bound"))?;
                        if !(lo < hi) {
                            return Err(err("empty universe"));
                        }
                        vars.insert(
                            name.to_string(),
                            LinguisticVariable { name: name.to_string(), universe: (lo, hi), terms: Vec::new() },
                        );
                        section = Some(name.to_string());
                    }
                    _ => return Err(err("expected `[name lo hi]` or `[rules]`")),
                }
                continue;
            }
            match section.as_deref() {
                None => return Err(err("entry outside a section")),
                Some("rules") => {
                    let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `e, h, c -> p`"))?;
                    let ante: Vec<String> = lhs.split(',').map(|s| s.trim().to_string()).collect();
                    if ante.len() != 3 {
                        return Err(err("rule needs exactly three antecedent terms"));
                    }
                    let [e, h, c]: [String; 3] = ante.try_into().expect("length checked");
                    raw_rules.push((line_no, [e, h, c, rhs.trim().to_string()]));
                }
                Some(var) => {
                    let (name, params) = line.split_once('=').ok_or_else(|| err("expected `term = a, b, c, d`"))?;
                    let p: Vec<f64> = params
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| err("non-numeric membership parameter"))?;
                    if p.len() != 4 {
                        return Err(err("membership function needs four parameters"));
                    }
                    let mf = TrapezoidMF::new(p[0], p[1], p[2], p[3]).map_err(|_| err("expected a <= b <= c <= d"))?;
                    let v = vars.get_mut(var).expect("section exists");
                    v.terms.push((name.trim().to_string(), mf));
                }
            }
        }
        let mut take = |name: &str| {
            vars.remove(name).ok_or_else(|| FuzzyError::Parse { line: 0, message: format!("missing [{name}] section") })
        };
        let evidence = take("evidence")?;
        let health = take("health")?;
        let certainty = take("certainty")?;
        let priority = take("priority")?;
        let rules = raw_rules
            .iter()
            .map(|(_, [e, h, c, p])| {
                Ok(FuzzyRule {
                    evidence: evidence.term_index(e)?,
                    health: health.term_index(h)?,
                    certainty: certainty.term_index(c)?,
                    priority: priority.term_index(p)?,
                })
            })
            .collect::<Result<Vec<_>, FuzzyError>>()?;
        RuleBase::new(evidence, health, certainty, priority, rules)
    }
}

/// Priorities over a robot's field; known obstacles are absent (null priority).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PriorityMap {
    values: BTreeMap<Cell, f64>,
}

impl PriorityMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, cell: Cell, rho: f64) {
        self.values.insert(cell, rho);
    }

    pub fn get(&self, cell: Cell) -> Option<f64> {
        self.values.get(&cell).copied()
    }

    /// Priority with null read as zero.
    pub fn value(&self, cell: Cell) -> f64 {
        self.get(cell).unwrap_or(0.0)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Cell, f64)> + '_ {
        self.values.iter().map(|(&c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Victims a robot currently senses that it has not already visited.
pub fn unvisited_in_field(local: &LocalVictimMap, field: &[Cell], tick: usize, observer: usize) -> Vec<VictimObservation> {
    local
        .entries()
        .filter(|(_, e)| !e.visited && e.tick == tick && field.contains(&e.position))
        .map(|(id, e)| VictimObservation { victim: id, position: e.position, health: e.health, tick: e.tick, observer })
        .collect()
}

/// Runs the inference for every non-obstacle cell of `field`.
///
/// `victims` are the sightings the robot acts on; a cell's health input is
/// the lowest perceived health among them, or [`NO_VICTIM_HEALTH`].
pub fn build_priority_map(
    robot: &RobotState,
    field: &[Cell],
    victims: &[VictimObservation],
    scan: &ScanCertaintyMap,
    occupancy: &OccupancyMap,
    rules: &RuleBase,
) -> Result<PriorityMap, FuzzyError> {
    let mut map = PriorityMap::new();
    for &cell in field {
        if occupancy.is_known_obstacle(cell) {
            continue;
        }
        let evidence = victim_evidence(robot, cell, victims);
        let health = victims
            .iter()
            .filter(|o| o.position == cell)
            .map(|o| o.health)
            .fold(NO_VICTIM_HEALTH, f64::min);
        map.insert(cell, rules.infer(evidence, health, scan.certainty(cell))?);
    }
    Ok(map)
}
