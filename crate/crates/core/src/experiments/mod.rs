//! Configuration-driven experiments and their CSV/JSON artifacts.

pub mod config;
pub mod csvio;
pub mod runs;

pub use config::{ExperimentConfig, ExperimentKind};
pub use runs::{run, with_workers, Report};
