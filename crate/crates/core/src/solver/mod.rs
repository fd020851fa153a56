//! Semi-implicit finite differences: backward-Euler diffusion, explicit reaction.

pub mod grid;
pub mod scalar;
pub mod scheme;
pub mod system;
pub mod tridiag;

pub use grid::{Grid, GridConfig};
pub use scalar::{simulate_scalar, ScalarSimulator, ScalarTrajectory};
pub use scheme::SchemeConfig;
pub use system::{simulate, Diagnostic, Simulator, StateField, SterileModel, Trajectory};
