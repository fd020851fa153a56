//! Time integration of the four-equation system.

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::scheme::{SchemeConfig, StepPlan};
use super::tridiag::Tridiag;
use crate::error::{Error, Result};
use crate::model::{Densities, Equilibrium, ModelParams};
use crate::release::ReleaseProfile;

/// Nodal values of the four unknowns at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateField {
    pub t: f64,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub m: Vec<f64>,
    pub ms: Vec<f64>,
}

impl StateField {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        StateField { t: 0.0, e: vec![0.0; n], f: vec![0.0; n], m: vec![0.0; n], ms: vec![0.0; n] }
    }

    pub fn uniform(grid: &Grid, d: Densities) -> Self {
        let n = grid.len();
        StateField { t: 0.0, e: vec![d.e; n], f: vec![d.f; n], m: vec![d.m; n], ms: vec![d.ms; n] }
    }

    /// `(E*, F*, M*)` for `x < x0`, zero elsewhere; no sterile males.
    pub fn step_profile(grid: &Grid, eq: &Equilibrium, x0: f64) -> Self {
        let mut s = StateField::zeros(grid);
        for i in 0..grid.len() {
            if grid.x(i) < x0 {
                s.e[i] = eq.e_star;
                s.f[i] = eq.f_star;
                s.m[i] = eq.m_star;
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn components(&self) -> [(&'static str, &[f64]); 4] {
        [("E", &self.e), ("F", &self.f), ("M", &self.m), ("Ms", &self.ms)]
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for (name, v) in self.components() {
            if v.len() != grid.len() {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {} entries, grid has {}",
                    v.len(),
                    grid.len()
                )));
            }
            if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::InvalidParameter(format!("{name} has invalid entry {bad}")));
            }
        }
        Ok(())
    }
}

/// How the sterile density is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SterileModel {
    /// `Ms` solves its own diffusion equation driven by the release.
    #[default]
    Dynamic,
    /// `Ms(t,x) = A e^{-η(x-ct)}` for `x - ct >= 0`, zero behind, taken from the
    /// release profile and imposed directly.
    Prescribed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub t: f64,
    /// Mass removed by clipping since the previous snapshot.
    pub clipped_mass: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub snapshots: Vec<StateField>,
    pub diagnostics: Vec<Diagnostic>,
    pub dt: f64,
    /// Largest single clip relative to the component maximum.
    pub max_clip_ratio: f64,
    pub max_e_over_k: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateField {
        self.snapshots.last().expect("trajectory has at least the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Summary returned by [`Simulator::run`] when snapshots go to an observer.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub diagnostics: Vec<Diagnostic>,
    pub dt: f64,
    pub max_clip_ratio: f64,
    pub max_e_over_k: f64,
}

pub const CLIP_LIMIT: f64 = 1e-8;

/// Clipping performed in one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepClip {
    pub mass: f64,
    /// Largest clipped magnitude relative to its component maximum.
    pub ratio: f64,
}

pub struct Simulator {
    pub grid: Grid,
    pub params: ModelParams,
    pub release: ReleaseProfile,
    pub sterile: SterileModel,
    pub cfg: SchemeConfig,
    pub plan: StepPlan,
    diffusion: Tridiag,
}

impl Simulator {
    /// `f_bound` is the largest female density the reaction step must stay
    /// stable for; it enters the reaction Lipschitz bound.
    pub fn new(
        grid: Grid,
        params: ModelParams,
        release: ReleaseProfile,
        cfg: SchemeConfig,
        sterile: SterileModel,
        f_bound: f64,
    ) -> Result<Self> {
        params.validate()?;
        release.validate()?;
        let l_reac = params.reaction_lipschitz(f_bound);
        let plan = cfg.plan(grid.dx, params.d, l_reac)?;
        let a = params.d * plan.dt / (grid.dx * grid.dx);
        let diffusion = Tridiag::implicit_diffusion(grid.len(), a)?;
        Ok(Simulator { grid, params, release, sterile, cfg, plan, diffusion })
    }

    /// Simulator whose stability bound covers the equilibrium and `init`.
    pub fn for_state(
        grid: Grid,
        params: ModelParams,
        release: ReleaseProfile,
        cfg: SchemeConfig,
        sterile: SterileModel,
        init: &StateField,
    ) -> Result<Self> {
        let f_init = init.f.iter().cloned().fold(0.0, f64::max);
        let f_star = params.equilibrium().map(|e| e.f_star).unwrap_or(0.0);
        Simulator::new(grid, params, release, cfg, sterile, f_init.max(f_star))
    }

    #[inline]
    fn sterile_at(&self, t: f64, x: f64, ms: f64) -> f64 {
        match self.sterile {
            SterileModel::Dynamic => ms,
            SterileModel::Prescribed => {
                let z = x - self.release.c * t;
                if z >= 0.0 && self.release.mode == crate::release::ReleaseMode::MovingExponential {
                    self.release.a * (-self.release.eta * z).exp()
                } else {
                    0.0
                }
            }
        }
    }

    fn impose_sterile(&self, state: &mut StateField) {
        if self.sterile == SterileModel::Prescribed {
            for i in 0..state.len() {
                state.ms[i] = self.sterile_at(state.t, self.grid.x(i), 0.0);
            }
        }
    }

    /// Advance `state` by one step of `self.plan.dt`.
    pub fn step(&self, state: &mut StateField) -> Result<StepClip> {
        let p = &self.params;
        let dt = self.plan.dt;
        let t = state.t;
        let n = state.len();
        if self.cfg.reaction {
            for i in 0..n {
                let x = self.grid.x(i);
                let (e, f, m) = (state.e[i], state.f[i], state.m[i]);
                let ms = self.sterile_at(t, x, state.ms[i]);
                let [de, df, dm] = p.reaction(e, f, m, ms);
                state.e[i] = e + dt * de;
                state.f[i] = f + dt * df;
                state.m[i] = m + dt * dm;
                if self.sterile == SterileModel::Dynamic {
                    state.ms[i] = ms + dt * (self.release.lambda_at(t, x) - p.mu_s * ms);
                }
            }
        }
        self.diffusion.solve_in_place(&mut state.f);
        self.diffusion.solve_in_place(&mut state.m);
        if self.sterile == SterileModel::Dynamic {
            self.diffusion.solve_in_place(&mut state.ms);
        }
        state.t = t + dt;
        self.impose_sterile(state);

        let mut clip = StepClip::default();
        for (name, v) in [("E", &mut state.e), ("F", &mut state.f), ("M", &mut state.m), ("Ms", &mut state.ms)] {
            let vmax = v.iter().cloned().fold(0.0, f64::max);
            let mut worst = 0.0f64;
            for y in v.iter_mut() {
                if *y < 0.0 {
                    worst = worst.max(-*y);
                    clip.mass += -*y * self.grid.dx;
                    *y = 0.0;
                }
            }
            let limit = CLIP_LIMIT * vmax.max(f64::MIN_POSITIVE);
            if worst > limit {
                return Err(Error::ClipExceeded { t: state.t, component: name, magnitude: worst, limit });
            }
            if worst > 0.0 {
                clip.ratio = clip.ratio.max(worst / vmax.max(f64::MIN_POSITIVE));
            }
        }
        Ok(clip)
    }

    /// Integrate to `t_end`, handing every snapshot (including `t = 0`) to `observer`.
    pub fn run<O: FnMut(&StateField)>(&self, init: &StateField, mut observer: O) -> Result<RunSummary> {
        init.validate(&self.grid)?;
        let mut state = init.clone();
        state.t = 0.0;
        self.impose_sterile(&mut state);
        let mut diagnostics = Vec::with_capacity(self.plan.n_snapshots + 1);
        let mut max_e_over_k = state.e.iter().cloned().fold(0.0, f64::max) / self.params.k;
        observer(&state);
        diagnostics.push(Diagnostic { t: 0.0, clipped_mass: 0.0, dt: self.plan.dt });
        let mut max_clip_ratio = 0.0f64;
        let mut step_count = 0usize;
        for _ in 0..self.plan.n_snapshots {
            let mut clipped = 0.0;
            for _ in 0..self.plan.steps_per_snapshot {
                let c = self.step(&mut state)?;
                step_count += 1;
                // Avoid drift from repeated addition.
                state.t = step_count as f64 * self.plan.dt;
                self.impose_sterile(&mut state);
                max_clip_ratio = max_clip_ratio.max(c.ratio);
                clipped += c.mass;
                let emax = state.e.iter().cloned().fold(0.0, f64::max);
                max_e_over_k = max_e_over_k.max(emax / self.params.k);
            }
            observer(&state);
            diagnostics.push(Diagnostic { t: state.t, clipped_mass: clipped, dt: self.plan.dt });
        }
        Ok(RunSummary { diagnostics, dt: self.plan.dt, max_clip_ratio, max_e_over_k })
    }

    pub fn simulate(&self, init: &StateField) -> Result<Trajectory> {
        let mut snapshots = Vec::with_capacity(self.plan.n_snapshots + 1);
        let summary = self.run(init, |s| snapshots.push(s.clone()))?;
        Ok(Trajectory {
            grid: self.grid.clone(),
            snapshots,
            diagnostics: summary.diagnostics,
            dt: summary.dt,
            max_clip_ratio: summary.max_clip_ratio,
            max_e_over_k: summary.max_e_over_k,
        })
    }
}

/// Run the system from `init` with a dynamic sterile population.
pub fn simulate(
    init: &StateField,
    grid: &Grid,
    p: &ModelParams,
    pr: &ReleaseProfile,
    cfg: &SchemeConfig,
) -> Result<Trajectory> {
    Simulator::for_state(grid.clone(), *p, *pr, *cfg, SterileModel::Dynamic, init)?.simulate(init)
}
