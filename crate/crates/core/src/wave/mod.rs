//! Invasion speeds, front tracking, outcome classification and critical-parameter searches.

pub mod front;
pub mod outcome;
pub mod search;
pub mod speed;

pub use front::{front_position, least_squares_slope, track_front, FrontTrajectory};
pub use outcome::{classify_outcome, ClassifyRules, Outcome, OutcomeKind};
pub use search::{critical_amplitude, critical_speed, probe_outcome, run_probe, BracketStep, Probe, SearchResult, SearchSettings};
pub use speed::{gamma1, kpp_speed, minimal_speed, SpeedResult};
