//! Bisection for the amplitude or sweep speed separating control from reinvasion.

use serde::{Deserialize, Serialize};

use super::front::{track_front, FrontTrajectory};
use super::outcome::{classify_with, ClassifyRules, Outcome, OutcomeKind};
use crate::construct::verify::{verify_ordering, OrderingReport};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::release::ReleaseProfile;
use crate::solver::{simulate, GridConfig, SchemeConfig, StateField, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSettings {
    pub grid: GridConfig,
    pub scheme: SchemeConfig,
    /// Stop when the bracket is narrower than `rel_tol` times its larger end.
    pub rel_tol: f64,
    /// Times the controlled end may be pushed outward by `expansion_factor`.
    pub max_expansions: usize,
    pub expansion_factor: f64,
    pub rules: ClassifyRules,
    /// Fronts closer than this to a domain end stop the classification window (km).
    pub boundary_gap: f64,
    /// Front threshold as a fraction of `F*`.
    pub threshold_fraction: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            grid: GridConfig { x_min: -250.0, x_max: 400.0, dx: 0.25 },
            scheme: SchemeConfig::default(),
            rel_tol: 0.01,
            max_expansions: 0,
            expansion_factor: 10.0,
            rules: ClassifyRules::default(),
            boundary_gap: 20.0,
            threshold_fraction: 0.1,
        }
    }
}

/// One probe of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketStep {
    pub iteration: usize,
    pub lo: f64,
    pub hi: f64,
    pub probe: f64,
    pub kind: OutcomeKind,
    pub measured_speed: Option<f64>,
    /// True when the classifier found the run indeterminate and the
    /// front-versus-release-edge rule decided.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub parameter: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: OutcomeKind,
    pub hi_kind: OutcomeKind,
    pub history: Vec<BracketStep>,
    /// Endpoints rerun after the search gave the same classes.
    pub endpoints_stable: bool,
    /// Comparison check between the two endpoint runs (amplitude search only).
    pub ordering: Option<OrderingReport>,
}

/// A classified run from a step initial profile at `x = 0`.
#[derive(Debug, Clone)]
pub struct Probe {
    pub outcome: Outcome,
    /// The classifier was indeterminate and the front-versus-release-edge rule decided.
    pub fallback: bool,
    pub traj: Trajectory,
    pub front: FrontTrajectory,
    /// End of the classification window.
    pub horizon: f64,
}

pub fn run_probe(p: &ModelParams, pr: &ReleaseProfile, s: &SearchSettings) -> Result<Probe> {
    let grid = s.grid.build()?;
    let eq = p.equilibrium()?;
    let init = StateField::step_profile(&grid, &eq, 0.0);
    let traj = simulate(&init, &grid, p, pr, &s.scheme)?;
    let ft = track_front(&traj, s.threshold_fraction * eq.f_star);
    let horizon = ft
        .last_time_clear_of_boundary(&grid, s.boundary_gap)
        .ok_or_else(|| Error::Numerical("front starts next to the domain boundary".into()))?;
    match classify_with(&ft, pr, horizon, &s.rules) {
        Ok(outcome) => Ok(Probe { outcome, fallback: false, traj, front: ft, horizon }),
        Err(Error::Indeterminate(_)) => {
            // Decide by where the front ends relative to the release edge.
            let edge = pr.c * horizon;
            let ahead = ft.position_at(horizon) - edge.max(0.0);
            let kind = if ahead > s.rules.max_oscillation { OutcomeKind::Reinvasion } else { OutcomeKind::PushedBack };
            Ok(Probe { outcome: Outcome { kind, measured_speed: None }, fallback: true, traj, front: ft, horizon })
        }
        Err(e) => Err(e),
    }
}

/// Classify one release with the search settings (used by the CLI and tests).
pub fn probe_outcome(p: &ModelParams, pr: &ReleaseProfile, s: &SearchSettings) -> Result<(Outcome, bool)> {
    run_probe(p, pr, s).map(|pb| (pb.outcome, pb.fallback))
}

fn bisect<F>(
    name: &str,
    p: &ModelParams,
    make: F,
    bracket: (f64, f64),
    s: &SearchSettings,
    check_order: bool,
) -> Result<SearchResult>
where
    F: Fn(f64) -> Result<ReleaseProfile> + Sync,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidBracket(format!("{name} bracket ({lo}, {hi}) is empty")));
    }
    let mut history = Vec::new();
    let mut iteration = 0usize;
    let mut record = |history: &mut Vec<BracketStep>, lo: f64, hi: f64, x: f64, pb: &Probe| {
        history.push(BracketStep {
            iteration,
            lo,
            hi,
            probe: x,
            kind: pb.outcome.kind,
            measured_speed: pb.outcome.measured_speed,
            fallback: pb.fallback,
        });
        iteration += 1;
    };

    let (plo, phi) = rayon::join(|| run_probe(p, &make(lo)?, s), || run_probe(p, &make(hi)?, s));
    let (plo, mut phi) = (plo?, phi?);
    record(&mut history, lo, hi, lo, &plo);
    record(&mut history, lo, hi, hi, &phi);
    if plo.outcome.kind.is_controlled() {
        return Err(Error::InvalidBracket(format!(
            "{name} = {lo} is already controlled ({})",
            plo.outcome.kind
        )));
    }
    let mut expansions = 0;
    while !phi.outcome.kind.is_controlled() {
        if expansions >= s.max_expansions {
            return Err(Error::InvalidBracket(format!(
                "both ends of the {name} bracket ({lo}, {hi}) give {}",
                phi.outcome.kind
            )));
        }
        expansions += 1;
        lo = hi;
        hi = if hi > 0.0 { hi * s.expansion_factor } else { hi / s.expansion_factor };
        phi = run_probe(p, &make(hi)?, s)?;
        record(&mut history, lo, hi, hi, &phi);
    }
    let mut lo_kind = if expansions > 0 { history[history.len() - 2].kind } else { plo.outcome.kind };
    let mut hi_kind = phi.outcome.kind;
    while hi - lo > s.rel_tol * lo.abs().max(hi.abs()) {
        let mid = 0.5 * (lo + hi);
        let pb = run_probe(p, &make(mid)?, s)?;
        record(&mut history, lo, hi, mid, &pb);
        if pb.outcome.kind.is_controlled() {
            hi = mid;
            hi_kind = pb.outcome.kind;
        } else {
            lo = mid;
            lo_kind = pb.outcome.kind;
        }
    }

    let (rlo, rhi) = rayon::join(|| run_probe(p, &make(lo)?, s), || run_probe(p, &make(hi)?, s));
    let (rlo, rhi) = (rlo?, rhi?);
    let endpoints_stable = rlo.outcome.kind == lo_kind && rhi.outcome.kind == hi_kind;
    let ordering = if check_order { Some(verify_ordering(&rhi.traj, &rlo.traj, 1e-6)) } else { None };
    Ok(SearchResult {
        parameter: name.to_string(),
        value: 0.5 * (lo + hi),
        lo,
        hi,
        lo_kind,
        hi_kind,
        history,
        endpoints_stable,
        ordering,
    })
}

/// Smallest amplitude (to `rel_tol`) that keeps the front controlled.
/// The lower end must reinvade; the upper end must be controlled, possibly
/// after `max_expansions` geometric expansions.
pub fn critical_amplitude(
    p: &ModelParams,
    eta: f64,
    c: f64,
    s: &SearchSettings,
    bracket: (f64, f64),
) -> Result<SearchResult> {
    if bracket.0 < 0.0 {
        return Err(Error::InvalidBracket("amplitudes must be nonnegative".into()));
    }
    bisect("A", p, |a| ReleaseProfile::new(a, eta, c), bracket, s, true)
}

/// Fastest leftward sweep (to `rel_tol`) that keeps the front controlled.
/// `c_lo < c_hi <= 0`; `c_lo` must reinvade and `c_hi` must be controlled.
pub fn critical_speed(
    p: &ModelParams,
    a: f64,
    eta: f64,
    s: &SearchSettings,
    bracket: (f64, f64),
) -> Result<SearchResult> {
    if bracket.1 > 0.0 {
        return Err(Error::InvalidBracket("sweep speeds must be <= 0".into()));
    }
    let s = SearchSettings { max_expansions: 0, ..*s };
    bisect("c", p, |c| ReleaseProfile::new(a, eta, c), bracket, &s, false)
}
