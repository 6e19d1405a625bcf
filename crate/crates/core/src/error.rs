use thiserror::Error;

use crate::world::Cell;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("cell {0} is outside the grid")]
    OutsideGrid(Cell),
    #[error("grid must be at least 1x1, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("invalid health parameters: {0}")]
    HealthParams(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum FuzzyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid membership function {name}: {message}")]
    Membership { name: String, message: String },
    #[error("unknown term `{term}` for variable `{variable}`")]
    UnknownTerm { variable: String, term: String },
    #[error("rule base is not a complete 3x3x3 cover: {0}")]
    IncompleteRuleBase(String),
    #[error("no rule fired for inputs (e={evidence}, h={health}, c={certainty})")]
    NoRuleFired { evidence: f64, health: f64, certainty: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("no path from {from} to {to} through known-free cells")]
    NoPath { from: Cell, to: Cell },
    #[error("cell {0} is outside the grid")]
    OutsideGrid(Cell),
}

/// Scenario validation failure, addressed by the offending field.
#[derive(Debug, Error, PartialEq)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
