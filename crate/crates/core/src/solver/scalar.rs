//! Same scheme for the single-equation model (diffusion coefficient 1).

use super::grid::Grid;
use super::scheme::{SchemeConfig, StepPlan};
use super::system::CLIP_LIMIT;
use super::tridiag::Tridiag;
use crate::error::{Error, Result};
use crate::model::ScalarParams;
use crate::release::ReleaseProfile;

#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub dt: f64,
    pub max_clip_ratio: f64,
}

pub struct ScalarSimulator {
    pub grid: Grid,
    pub params: ScalarParams,
    pub release: ReleaseProfile,
    pub cfg: SchemeConfig,
    pub plan: StepPlan,
    diffusion: Tridiag,
}

impl ScalarSimulator {
    pub fn new(grid: Grid, params: ScalarParams, release: ReleaseProfile, cfg: SchemeConfig) -> Result<Self> {
        params.validate()?;
        release.validate()?;
        // |d/du [u/(u+Λ) βu/(βu/K+δ)]| <= 5β/(4δ) for every Λ >= 0.
        let l_reac = 1.25 * params.beta / params.delta + params.mu;
        let plan = cfg.plan(grid.dx, 1.0, l_reac)?;
        let diffusion = Tridiag::implicit_diffusion(grid.len(), plan.dt / (grid.dx * grid.dx))?;
        Ok(ScalarSimulator { grid, params, release, cfg, plan, diffusion })
    }

    /// One step from time `t`; returns the clipped ratio.
    pub fn step(&self, u: &mut [f64], t: f64) -> Result<f64> {
        let dt = self.plan.dt;
        if self.cfg.reaction {
            for (i, v) in u.iter_mut().enumerate() {
                let lam = self.release.lambda_at(t, self.grid.x(i));
                *v += dt * self.params.reaction(*v, lam);
            }
        }
        self.diffusion.solve_in_place(u);
        let vmax = u.iter().cloned().fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for v in u.iter_mut() {
            if *v < 0.0 {
                worst = worst.max(-*v);
                *v = 0.0;
            }
        }
        let limit = CLIP_LIMIT * vmax.max(f64::MIN_POSITIVE);
        if worst > limit {
            return Err(Error::ClipExceeded { t: t + dt, component: "u", magnitude: worst, limit });
        }
        Ok(if worst > 0.0 { worst / vmax.max(f64::MIN_POSITIVE) } else { 0.0 })
    }

    pub fn simulate(&self, init: &[f64]) -> Result<ScalarTrajectory> {
        if init.len() != self.grid.len() {
            return Err(Error::InvalidParameter("initial data does not match the grid".into()));
        }
        if init.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("initial data must be finite and nonnegative".into()));
        }
        let mut u = init.to_vec();
        let mut times = vec![0.0];
        let mut out = vec![u.clone()];
        let mut max_clip_ratio = 0.0f64;
        let mut k = 0usize;
        for _ in 0..self.plan.n_snapshots {
            for _ in 0..self.plan.steps_per_snapshot {
                let t = k as f64 * self.plan.dt;
                max_clip_ratio = max_clip_ratio.max(self.step(&mut u, t)?);
                k += 1;
            }
            times.push(k as f64 * self.plan.dt);
            out.push(u.clone());
        }
        Ok(ScalarTrajectory { grid: self.grid.clone(), times, u: out, dt: self.plan.dt, max_clip_ratio })
    }
}

pub fn simulate_scalar(
    init: &[f64],
    grid: &Grid,
    s: &ScalarParams,
    pr: &ReleaseProfile,
    cfg: &SchemeConfig,
) -> Result<ScalarTrajectory> {
    ScalarSimulator::new(grid.clone(), *s, *pr, *cfg)?.simulate(init)
}
