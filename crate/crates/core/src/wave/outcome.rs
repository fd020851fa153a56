use serde::{Deserialize, Serialize};

use super::front::FrontTrajectory;
use crate::error::{Error, Result};
use crate::release::ReleaseProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Invasion,
    Blocked,
    PushedBack,
    Reinvasion,
    Extinct,
}

impl OutcomeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeKind::Invasion => "invasion",
            OutcomeKind::Blocked => "blocked",
            OutcomeKind::PushedBack => "pushed_back",
            OutcomeKind::Reinvasion => "reinvasion",
            OutcomeKind::Extinct => "extinct",
        }
    }

    /// Whether the release holds the front (the "success" side of a search).
    pub fn is_controlled(&self) -> bool {
        matches!(self, OutcomeKind::Blocked | OutcomeKind::PushedBack | OutcomeKind::Extinct)
    }
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub measured_speed: Option<f64>,
}

/// Thresholds of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyRules {
    /// Speeds within `±dead_band` km/day count as stationary.
    pub dead_band: f64,
    /// Largest displacement over the second half for a blocked front (km).
    pub blocked_drift: f64,
    /// Largest excursion against the trend before the run is declared indeterminate (km).
    pub max_oscillation: f64,
}

impl Default for ClassifyRules {
    fn default() -> Self {
        ClassifyRules { dead_band: 0.02, blocked_drift: 5.0, max_oscillation: 10.0 }
    }
}

/// Largest excursion of `x` against the direction `sign` (positive: drops).
fn counter_trend_excursion(x: &[f64], sign: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &v in x {
        let s = sign * v;
        best = best.max(s);
        worst = worst.max(best - s);
    }
    worst
}

pub fn classify_outcome(ft: &FrontTrajectory, pr: &ReleaseProfile, horizon: f64) -> Result<Outcome> {
    classify_with(ft, pr, horizon, &ClassifyRules::default())
}

pub fn classify_with(
    ft: &FrontTrajectory,
    pr: &ReleaseProfile,
    horizon: f64,
    rules: &ClassifyRules,
) -> Result<Outcome> {
    let t_last = *ft.times.last().ok_or_else(|| Error::InvalidParameter("empty front trajectory".into()))?;
    if t_last + 1e-9 < horizon {
        return Err(Error::InvalidParameter(format!("trajectory ends at {t_last}, before horizon {horizon}")));
    }
    let end = ft.position_at(horizon);
    if !end.is_finite() {
        return Ok(Outcome { kind: OutcomeKind::Extinct, measured_speed: None });
    }
    let (t, x) = ft.window(0.5 * horizon, horizon);
    let speed = super::front::least_squares_slope(&t, &x)
        .ok_or_else(|| Error::Indeterminate("too few front samples in the second half".into()))?;
    let sign = if speed >= 0.0 { 1.0 } else { -1.0 };
    let excursion = counter_trend_excursion(&x, sign);
    if excursion > rules.max_oscillation {
        return Err(Error::Indeterminate(format!(
            "front moves {excursion:.1} km against its trend in the second half"
        )));
    }
    let kind = if !pr.is_active() {
        if speed > 0.0 {
            OutcomeKind::Invasion
        } else {
            return Err(Error::Indeterminate(format!("uncontrolled front is not advancing (speed {speed})")));
        }
    } else if speed > rules.dead_band {
        OutcomeKind::Reinvasion
    } else if speed < -rules.dead_band {
        OutcomeKind::PushedBack
    } else {
        let drift = (end - ft.position_at(0.5 * horizon)).abs();
        if drift <= rules.blocked_drift {
            OutcomeKind::Blocked
        } else {
            return Err(Error::Indeterminate(format!(
                "front speed {speed:.4} is inside the dead band but it drifted {drift:.1} km"
            )));
        }
    };
    Ok(Outcome { kind, measured_speed: Some(speed) })
}
