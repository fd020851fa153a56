//! Sterile-insect release toolkit.
//!
//! Simulates the four-compartment mosquito model (aquatic phase `E`, fertile
//! females `F`, fertile males `M`, sterile males `Ms`) on a truncated line,
//! builds explicit traveling-wave super- and sub-solutions and checks their
//! differential inequalities, computes invasion speeds, and searches for
//! release strategies `Λ(t,x) = A·exp(-η(x - ct))` that block or push back
//! the wild front.
//!
//! Units are days and kilometres throughout.

pub mod construct;
pub mod error;
pub mod experiments;
pub mod model;
pub mod quad;
pub mod release;
pub mod solver;
pub mod wave;

pub use error::{Error, Result};
pub use model::{Densities, Equilibrium, ModelParams, ScalarParams};
pub use release::{ReleaseMode, ReleaseProfile};
