//! Grid-world multi-robot search and rescue: victim dynamics, sensing, fuzzy
//! cell priorities, path grading, a supervisory MPC and a tick-based simulator.

pub mod control;
pub mod error;
pub mod fuzzy;
pub mod optimize;
pub mod pathplan;
pub mod sensing;
pub mod world;
pub mod sim;
