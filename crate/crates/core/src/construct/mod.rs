//! Explicit traveling-wave super- and sub-solutions and their verification.
//!
//! Every profile is a function of the wave coordinate `z = x - ct` and
//! exposes its value and first two derivatives branch by branch, so the
//! defining inequalities can be checked pointwise and the derivative
//! formulas cross-checked against finite differences.

pub mod fd;
pub mod scalar;
pub mod system_sub;
pub mod system_super;
pub mod verify;

pub use scalar::{ScalarSub, ScalarSuper};
pub use system_sub::{SubCase, SystemSub};
pub use system_super::SystemSuper;
pub use verify::{
    verify_ms_bound, verify_ordering, verify_profile_ordering, verify_scalar, verify_scalar_at, verify_system, verify_system_at, verify_system_on, Inequality, MsBoundReport, MsInit,
    OrderingReport, VerificationReport,
};

use serde::{Deserialize, Serialize};

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { v: 0.0, d1: 0.0, d2: 0.0 };

    pub fn constant(v: f64) -> Jet {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    /// `k e^{s x}` and its derivatives.
    pub fn exp(k: f64, s: f64, x: f64) -> Jet {
        let v = k * (s * x).exp();
        Jet { v, d1: s * v, d2: s * s * v }
    }

    pub fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

/// Which branch to use at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A piecewise-smooth profile of the three wild compartments, together with the
/// sterile control it is built for.
pub trait WaveSystem {
    fn speed(&self) -> f64;
    fn params(&self) -> &crate::ModelParams;
    /// `(E, F, M)` jets; at a kink `side` selects the branch, elsewhere it is ignored.
    fn jets(&self, x: f64, side: Side) -> [Jet; 3];
    /// Sterile density `φ(x)` imposed in the wave frame.
    fn control(&self, x: f64) -> f64;
    /// `(component index, position)` of every kink.
    fn kinks(&self) -> Vec<(usize, f64)>;
    /// Natural length scale used for finite-difference spacing.
    fn length_scale(&self) -> f64;
    /// Sampling window for the residual checks.
    fn window(&self) -> (f64, f64);
}

/// Single-equation analogue of [`WaveSystem`].
pub trait ScalarWave {
    fn speed(&self) -> f64;
    fn params(&self) -> &crate::ScalarParams;
    fn jet(&self, x: f64, side: Side) -> Jet;
    fn control(&self, x: f64) -> f64;
    fn kinks(&self) -> Vec<f64>;
    fn length_scale(&self) -> f64;
    fn window(&self) -> (f64, f64);
}
