//! TOML configuration of a single experiment run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{GridConfig, SchemeConfig};
use crate::wave::SearchSettings;
use crate::{ModelParams, ReleaseProfile, ScalarParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Simulate,
    Figure1,
    Speed,
    VerifyConstructions,
    SearchAmplitude,
    SearchSpeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    /// Wild population at equilibrium for `x < step_at`, zero beyond.
    pub step_at: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData { step_at: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Settings {
    pub amplitude: f64,
    pub eta: f64,
    /// Sweep speeds of the controlled panels.
    pub speeds: Vec<f64>,
    pub grid: GridConfig,
    /// Write full snapshot tables (large) in addition to fronts.
    pub write_snapshots: bool,
}

impl Default for Figure1Settings {
    fn default() -> Self {
        Figure1Settings {
            amplitude: 600.0,
            eta: 0.2,
            speeds: vec![0.0, -0.3, -0.5],
            grid: SearchSettings::default().grid,
            write_snapshots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedSettings {
    /// Start of the least-squares window (days).
    pub fit_start: f64,
    pub boundary_gap: f64,
    pub threshold_fraction: f64,
    /// Largest accepted relative gap between measured and minimal speed.
    pub tolerance: f64,
}

impl Default for SpeedSettings {
    fn default() -> Self {
        SpeedSettings { fit_start: 100.0, boundary_gap: 20.0, threshold_fraction: 0.1, tolerance: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Wave speeds at which every construction is checked.
    pub speeds: Vec<f64>,
    pub samples: usize,
    /// Extra uniformly random sample points per check, drawn from `seed`.
    pub random_samples: usize,
    pub tol: f64,
    /// Mating-fraction cap used by the scalar super-solution.
    pub alpha: f64,
    /// `αC_E/E*` for the system super-solution.
    pub kappa: Option<f64>,
    /// Sterile lower-bound check: barrier `C_s e^{-η(x-ct)}` at speed `ms_speed`.
    pub ms_c_s: f64,
    pub ms_eta: f64,
    pub ms_speed: f64,
    /// Release amplitude; defaults to 1.1 times the edge amplitude.
    pub ms_amplitude: Option<f64>,
    pub ms_grid: GridConfig,
    pub ms_t_end: f64,
    /// Wave-frame sandwich run between the sub- and super-solution.
    pub sandwich_grid: GridConfig,
    pub sandwich_t_end: f64,
    pub ordering_tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            speeds: vec![-0.3, -1.0],
            samples: 10_000,
            random_samples: 1000,
            tol: 1e-8,
            alpha: 0.1,
            kappa: None,
            ms_c_s: 100.0,
            ms_eta: 0.2,
            ms_speed: -0.3,
            ms_amplitude: None,
            ms_grid: GridConfig { x_min: -100.0, x_max: 200.0, dx: 0.25 },
            ms_t_end: 100.0,
            sandwich_grid: GridConfig { x_min: -150.0, x_max: 150.0, dx: 0.25 },
            sandwich_t_end: 100.0,
            ordering_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub bracket: (f64, f64),
    pub eta: f64,
    /// Sweep speed for amplitude searches.
    pub speed: f64,
    /// Release amplitude for speed searches.
    pub amplitude: f64,
    pub settings: SearchSettings,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bracket: (0.0, 600.0),
            eta: 0.2,
            speed: -0.3,
            amplitude: 600.0,
            settings: SearchSettings { max_expansions: 4, ..SearchSettings::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: ModelParams,
    pub scalar: ScalarParams,
    pub grid: GridConfig,
    pub scheme: SchemeConfig,
    pub release: ReleaseProfile,
    pub initial: InitialData,
    pub figure1: Figure1Settings,
    pub speed: SpeedSettings,
    pub verify: VerifySettings,
    pub search: SearchConfig,
    pub output: PathBuf,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::default(),
            params: ModelParams::default(),
            scalar: ScalarParams::default(),
            grid: GridConfig::default(),
            scheme: SchemeConfig::default(),
            release: ReleaseProfile::default(),
            initial: InitialData::default(),
            figure1: Figure1Settings::default(),
            speed: SpeedSettings::default(),
            verify: VerifySettings::default(),
            search: SearchConfig::default(),
            output: PathBuf::from("out"),
            seed: 0,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks the blocks the chosen kind uses.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.scheme.validate()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        match self.kind {
            ExperimentKind::Simulate => {
                self.grid.build()?;
                self.release.validate()?;
            }
            ExperimentKind::Figure1 => {
                self.params.equilibrium()?;
                self.figure1.grid.build()?;
                for &c in &self.figure1.speeds {
                    ReleaseProfile::new(self.figure1.amplitude, self.figure1.eta, c)?;
                }
            }
            ExperimentKind::Speed => {
                self.params.equilibrium()?;
                self.grid.build()?;
            }
            ExperimentKind::VerifyConstructions => {
                self.params.equilibrium()?;
                self.scalar.validate()?;
                let v = &self.verify;
                if v.speeds.is_empty() || v.speeds.iter().any(|&c| !(c < 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "verification speeds must be negative, got {:?}",
                        v.speeds
                    )));
                }
                if !(v.ms_speed <= 0.0) {
                    return Err(Error::InvalidParameter(format!("ms_speed must be <= 0, got {}", v.ms_speed)));
                }
                if v.samples < 2 {
                    return Err(Error::Config("need at least 2 samples".into()));
                }
                v.ms_grid.build()?;
                v.sandwich_grid.build()?;
            }
            ExperimentKind::SearchAmplitude | ExperimentKind::SearchSpeed => {
                self.params.equilibrium()?;
                self.search.settings.grid.build()?;
                self.search.settings.scheme.validate()?;
                let (lo, hi) = self.search.bracket;
                if !(lo < hi) {
                    return Err(Error::InvalidBracket(format!("bracket ({lo}, {hi}) is empty")));
                }
            }
        }
        Ok(())
    }
}
