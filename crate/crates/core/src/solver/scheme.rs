use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    NeumannZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub dt_safety: f64,
    /// Largest allowed `dt · L_reac`.
    pub cfl_reaction_cap: f64,
    pub boundary: Boundary,
    pub t_end: f64,
    pub snapshot_every: f64,
    /// Switch the reaction and release terms off (pure diffusion).
    pub reaction: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            dt_safety: 0.9,
            cfl_reaction_cap: 0.5,
            boundary: Boundary::NeumannZeroFlux,
            t_end: 400.0,
            snapshot_every: 5.0,
            reaction: true,
        }
    }
}

/// Resolved time stepping: `steps_per_snapshot` steps of `dt` between snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub steps_per_snapshot: usize,
    pub n_snapshots: usize,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!("dt_safety must lie in (0, 1], got {}", self.dt_safety)));
        }
        if !(self.cfl_reaction_cap > 0.0) {
            return Err(Error::InvalidParameter("cfl_reaction_cap must be positive".into()));
        }
        if !(self.t_end > 0.0 && self.snapshot_every > 0.0) {
            return Err(Error::InvalidParameter("t_end and snapshot_every must be positive".into()));
        }
        let ratio = self.t_end / self.snapshot_every;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a multiple of snapshot_every = {}",
                self.t_end, self.snapshot_every
            )));
        }
        Ok(())
    }

    /// `dt_safety · min(dx²/(2D), cap / L_reac)`.
    pub fn max_dt(&self, dx: f64, diffusion: f64, l_reac: f64) -> f64 {
        let diff = dx * dx / (2.0 * diffusion);
        let reac = if self.reaction && l_reac > 0.0 { self.cfl_reaction_cap / l_reac } else { f64::INFINITY };
        self.dt_safety * diff.min(reac)
    }

    pub fn plan(&self, dx: f64, diffusion: f64, l_reac: f64) -> Result<StepPlan> {
        self.validate()?;
        let dt_max = self.max_dt(dx, diffusion, l_reac);
        let steps_per_snapshot = (self.snapshot_every / dt_max).ceil().max(1.0) as usize;
        Ok(StepPlan {
            dt: self.snapshot_every / steps_per_snapshot as f64,
            steps_per_snapshot,
            n_snapshots: (self.t_end / self.snapshot_every).round() as usize,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaction_bound_dominates_on_default_grid() {
        let p = crate::ModelParams::default();
        let cfg = SchemeConfig::default();
        let l = p.reaction_lipschitz(77.4);
        let dt = cfg.max_dt(0.25, p.d, l);
        assert!((dt - 0.9 * 0.5 / l).abs() < 1e-15);
        let plan = cfg.plan(0.25, p.d, l).unwrap();
        assert!(plan.dt <= dt);
        assert_eq!(plan.n_snapshots, 80);
    }

    #[test]
    fn rejects_misaligned_horizon() {
        let cfg = SchemeConfig { t_end: 10.5, snapshot_every: 2.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
