//! The named experiments behind the command-line front end.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::csvio;
use crate::construct::verify::{linspace, verify_profile_ordering, verify_scalar_at, verify_system_at};
use crate::construct::{
    verify_ms_bound, verify_ordering, Inequality, MsInit, ScalarSub, ScalarSuper, ScalarWave, Side, SystemSub,
    SystemSuper, VerificationReport, WaveSystem,
};
use crate::error::{Error, Result};
use crate::release::{ms_edge_amplitude, ReleaseProfile};
use crate::solver::{simulate, GridConfig, SchemeConfig, Simulator, StateField, SterileModel, Trajectory};
use crate::wave::{
    minimal_speed, run_probe, track_front, OutcomeKind, SearchResult, SearchSettings, SpeedResult,
};

/// Run `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub snapshots: usize,
    pub dt: f64,
    pub max_clip_ratio: f64,
    pub max_e_over_k: f64,
    pub final_front: f64,
    /// Names of the files written to the output directory.
    pub files: Vec<String>,
}

pub fn run_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<SimulateReport> {
    let grid = cfg.grid.build()?;
    let eq = cfg.params.equilibrium()?;
    let init = StateField::step_profile(&grid, &eq, cfg.initial.step_at);
    let traj = simulate(&init, &grid, &cfg.params, &cfg.release, &cfg.scheme)?;
    let ft = track_front(&traj, 0.1 * eq.f_star);
    let files: Vec<String> = ["snapshots.csv", "diagnostics.csv", "front.csv"].map(String::from).to_vec();
    csvio::write_snapshots(&out.join(&files[0]), &traj)?;
    csvio::write_diagnostics(&out.join(&files[1]), &traj.diagnostics)?;
    csvio::write_front(&out.join(&files[2]), &ft)?;
    let rep = SimulateReport {
        snapshots: traj.snapshots.len(),
        dt: traj.dt,
        max_clip_ratio: traj.max_clip_ratio,
        max_e_over_k: traj.max_e_over_k,
        final_front: *ft.positions.last().unwrap_or(&f64::NAN),
        files,
    };
    write_json(&out.join("summary.json"), &rep)?;
    Ok(rep)
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} snapshots, dt = {:.6e}", self.snapshots, self.dt)?;
        writeln!(f, "max clip ratio {:.3e}, max E/K {:.12}", self.max_clip_ratio, self.max_e_over_k)?;
        writeln!(f, "final front at x = {:.4}", self.final_front)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub label: String,
    /// `None` for the uncontrolled panel.
    pub speed: Option<f64>,
    pub kind: Option<OutcomeKind>,
    pub expected: Option<OutcomeKind>,
    pub measured_speed: Option<f64>,
    pub fallback: bool,
    pub horizon: Option<f64>,
    pub max_clip_ratio: Option<f64>,
    pub max_e_over_k: Option<f64>,
    pub error: Option<String>,
}

impl ScenarioResult {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.expected.is_none_or(|e| Some(e) == self.kind)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Report {
    pub scenarios: Vec<ScenarioResult>,
    pub pass: bool,
}

impl fmt::Display for Figure1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.scenarios {
            let c = s.speed.map_or("off".to_string(), |c| format!("c = {c}"));
            let kind = s.kind.map_or("-".to_string(), |k| k.to_string());
            let expected = s.expected.map_or(String::new(), |k| format!(" (expected {k})"));
            let speed = s.measured_speed.map_or(String::new(), |v| format!(", front speed {v:+.4}"));
            let fb = if s.fallback { ", edge rule" } else { "" };
            let err = s.error.as_ref().map_or(String::new(), |e| format!(", error: {e}"));
            writeln!(f, "{} [{c}]: {kind}{expected}{speed}{fb}{err} {}", s.label, verdict(s.pass()))?;
        }
        Ok(())
    }
}

const FIGURE1_EXPECTED: [OutcomeKind; 4] =
    [OutcomeKind::Invasion, OutcomeKind::Blocked, OutcomeKind::PushedBack, OutcomeKind::Reinvasion];

/// The uncontrolled run plus one controlled run per configured speed.
/// Expected classes apply only to the reference settings (A = 600, η = 0.2,
/// c ∈ {0, -0.3, -0.5}).
pub fn run_figure1(cfg: &ExperimentConfig, out: &Path) -> Result<Figure1Report> {
    let fs = &cfg.figure1;
    let reference = fs.amplitude == 600.0 && fs.eta == 0.2 && fs.speeds == [0.0, -0.3, -0.5];
    let settings = SearchSettings { grid: fs.grid, scheme: cfg.scheme, ..SearchSettings::default() };
    let mut runs: Vec<(String, Option<f64>)> = vec![("a".into(), None)];
    for (i, &c) in fs.speeds.iter().enumerate() {
        let label = char::from_u32('b' as u32 + i as u32).map_or(format!("s{i}"), |ch| ch.to_string());
        runs.push((label, Some(c)));
    }
    let scenarios: Vec<ScenarioResult> = runs
        .par_iter()
        .enumerate()
        .map(|(i, (label, speed))| {
            let expected = if reference { FIGURE1_EXPECTED.get(i).copied() } else { None };
            let mut res = ScenarioResult {
                label: label.clone(),
                speed: *speed,
                kind: None,
                expected,
                measured_speed: None,
                fallback: false,
                horizon: None,
                max_clip_ratio: None,
                max_e_over_k: None,
                error: None,
            };
            let mut go = || -> Result<()> {
                let pr = match speed {
                    None => ReleaseProfile::off(),
                    Some(c) => ReleaseProfile::new(fs.amplitude, fs.eta, *c)?,
                };
                let probe = run_probe(&cfg.params, &pr, &settings)?;
                res.kind = Some(probe.outcome.kind);
                res.measured_speed = probe.outcome.measured_speed;
                res.fallback = probe.fallback;
                res.horizon = Some(probe.horizon);
                res.max_clip_ratio = Some(probe.traj.max_clip_ratio);
                res.max_e_over_k = Some(probe.traj.max_e_over_k);
                let stem = format!("figure1_{label}");
                if fs.write_snapshots {
                    csvio::write_snapshots(&out.join(format!("{stem}_snapshots.csv")), &probe.traj)?;
                }
                csvio::write_diagnostics(&out.join(format!("{stem}_diagnostics.csv")), &probe.traj.diagnostics)?;
                csvio::write_front(&out.join(format!("{stem}_front.csv")), &probe.front)?;
                Ok(())
            };
            if let Err(e) = go() {
                res.error = Some(e.to_string());
            }
            res
        })
        .collect();
    let pass = scenarios.iter().all(ScenarioResult::pass);
    let rep = Figure1Report { scenarios, pass };
    write_json(&out.join("figure1_summary.json"), &rep)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedReport {
    pub minimal: SpeedResult,
    pub measured: Option<f64>,
    pub window: (f64, f64),
    pub rel_gap: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl fmt::Display for SpeedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.minimal;
        writeln!(f, "minimal speed c_bar = {:.10} at mu_bar = {:.10}", m.c_bar, m.mu_bar)?;
        writeln!(f, "gamma1(mu_bar) = {:.6}, condition {}", m.gamma1_at_mu_bar, verdict(m.condition_ok))?;
        match (self.measured, self.rel_gap) {
            (Some(v), Some(g)) => writeln!(
                f,
                "measured front speed {v:.6} over t in [{}, {}], relative gap {g:.4} {}",
                self.window.0,
                self.window.1,
                verdict(self.pass)
            ),
            _ => writeln!(f, "front speed could not be measured FAIL"),
        }
    }
}

pub fn run_speed(cfg: &ExperimentConfig, out: &Path) -> Result<SpeedReport> {
    let minimal = minimal_speed(&cfg.params)?;
    let ss = &cfg.speed;
    let grid = cfg.grid.build()?;
    let eq = cfg.params.equilibrium()?;
    let init = StateField::step_profile(&grid, &eq, cfg.initial.step_at);
    let traj = simulate(&init, &grid, &cfg.params, &ReleaseProfile::off(), &cfg.scheme)?;
    let ft = track_front(&traj, ss.threshold_fraction * eq.f_star);
    csvio::write_front(&out.join("speed_front.csv"), &ft)?;
    let t1 = ft.last_time_clear_of_boundary(&grid, ss.boundary_gap).unwrap_or(0.0);
    let measured = ft.slope_over(ss.fit_start, t1);
    let rel_gap = measured.map(|v| (v - minimal.c_bar).abs() / minimal.c_bar);
    let pass = rel_gap.is_some_and(|g| g < ss.tolerance);
    let rep = SpeedReport { minimal, measured, window: (ss.fit_start, t1), rel_gap, tolerance: ss.tolerance, pass };
    write_json(&out.join("speed.json"), &rep)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckLine>,
    pub pass: bool,
    pub first_failure: Option<String>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}", verdict(c.pass), c.name)?;
            for line in c.detail.lines() {
                writeln!(f, "    {line}")?;
            }
        }
        match &self.first_failure {
            None => writeln!(f, "all {} checks pass", self.checks.len()),
            Some(n) => writeln!(f, "first failing check: {n}"),
        }
    }
}

/// Evenly spaced samples of `window` plus `extra` seeded random ones.
fn sample_points(window: (f64, f64), n: usize, extra: usize, seed: u64) -> Vec<f64> {
    let mut xs = linspace(window.0, window.1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    xs.extend((0..extra).map(|_| rng.gen_range(window.0..=window.1)));
    xs
}

fn residual_check(name: String, rep: &VerificationReport, extra: Vec<(String, bool)>) -> CheckLine {
    let mut detail = rep.to_string();
    let mut pass = rep.pass;
    for (msg, ok) in extra {
        detail.push_str(&format!("{msg} {}\n", verdict(ok)));
        pass &= ok;
    }
    CheckLine { name, pass, detail }
}

/// Runs the wave-frame system from `init` under the prescribed barrier of `sup`.
fn wave_frame_run(
    cfg: &ExperimentConfig,
    sup: &SystemSuper,
    grid_cfg: &GridConfig,
    t_end: f64,
    init: &dyn Fn(f64) -> [f64; 3],
) -> Result<Trajectory> {
    let grid = grid_cfg.build()?;
    let mut state = StateField::zeros(&grid);
    for i in 0..grid.len() {
        let [e, f, m] = init(grid.x(i));
        state.e[i] = e;
        state.f[i] = f;
        state.m[i] = m;
    }
    let pr = ReleaseProfile::new(sup.c_s, sup.eta, sup.c)?;
    let scheme = SchemeConfig { t_end, ..cfg.scheme };
    Simulator::for_state(grid, cfg.params, pr, scheme, SterileModel::Prescribed, &state)?.simulate(&state)
}

/// Largest relative excursion of `traj` outside `[φ̲(x-ct), φ̄(x-ct)]`.
fn sandwich_excursion(traj: &Trajectory, sub: &SystemSub, sup: &SystemSuper) -> (f64, f64) {
    let eq = &sup.eq;
    let scale = [eq.e_star, eq.f_star, eq.m_star];
    let (mut below, mut above) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in &traj.snapshots {
        for i in 0..s.len() {
            let z = traj.grid.x(i) - sup.c * s.t;
            let lo = sub.jets(z, Side::Right);
            let hi = sup.jets(z, Side::Right);
            for (k, v) in [s.e[i], s.f[i], s.m[i]].into_iter().enumerate() {
                below = below.max((lo[k].v - v) / scale[k]);
                above = above.max((v - hi[k].v) / scale[k]);
            }
        }
    }
    (below, above)
}

pub fn run_verify(cfg: &ExperimentConfig, out: &Path) -> Result<VerifyReport> {
    let v = &cfg.verify;
    let p = &cfg.params;
    let mut checks = Vec::new();
    let mut seed = cfg.seed;
    let mut next_seed = || {
        seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        seed
    };
    for &c in &v.speeds {
        let ss = ScalarSuper::new(c, v.alpha, &cfg.scalar)?;
        let rep = verify_scalar_at(&ss, Inequality::Super, &sample_points(ss.window(), v.samples, v.random_samples, next_seed()), v.tol);
        let root = ss.root_residual().abs();
        checks.push(residual_check(
            format!("scalar super-solution, c = {c}"),
            &rep,
            vec![(format!("r(alpha) = {:.12}, root identity {root:.1e}, A_min = {}", ss.r_alpha, ss.a_min), root < 1e-12)],
        ));

        let sb = ScalarSub::new(c, &cfg.scalar)?;
        let rep = verify_scalar_at(&sb, Inequality::Sub, &sample_points(sb.window(), v.samples, v.random_samples, next_seed()), v.tol);
        let defect = sb.energy_defect();
        checks.push(residual_check(
            format!("scalar sub-solution, c = {c}"),
            &rep,
            vec![(format!("energy identity defect {defect:.2e} over {} nodes", sb.w.len()), defect < 1e-8)],
        ));

        let sup = SystemSuper::new(c, p, v.kappa)?;
        let xs = sample_points(sup.window(), v.samples, v.random_samples, next_seed());
        let rep = verify_system_at(&sup, Inequality::Super, &xs, v.tol);
        let caps_ok = xs.iter().filter(|&&x| x >= 0.0).all(|&x| {
            let [e, _, m] = sup.jets(x, Side::Right);
            let env = (-sup.lambda * x).exp();
            e.v <= sup.eq.e_star.min(sup.c_e * env) * (1.0 + 1e-12)
                && m.v <= sup.eq.m_star.min(sup.c_m * env) * (1.0 + 1e-12)
        });
        checks.push(residual_check(
            format!("system super-solution, c = {c}"),
            &rep,
            vec![
                (
                    format!(
                        "lambda = {:.6}, alpha = {:.3e}, C_E = {:.4e}, C_M = {:.4e}, C_s = {:.4e}, eta = {:.6}, x_E = {:.4}, x_M = {:.4}",
                        sup.lambda, sup.alpha, sup.c_e, sup.c_m, sup.c_s, sup.eta, sup.x_e, sup.x_m
                    ),
                    sup.c_e > sup.eq.e_star && sup.c_m > sup.eq.m_star * sup.c_e / sup.eq.e_star,
                ),
                ("E and M below min(X*, C_X e^{-lambda x}) on x >= 0".into(), caps_ok),
            ],
        ));
        csvio::write_profiles(&out.join(format!("profiles_super_c{c}.csv")), &sup, &linspace(sup.window().0, sup.window().1, v.samples))?;

        let sub = SystemSub::new(c, p)?;
        let rep = verify_system_at(&sub, Inequality::Sub, &sample_points(sub.window(), v.samples, v.random_samples, next_seed()), v.tol);
        let [rf, rm] = sub.root_residuals();
        checks.push(residual_check(
            format!("system sub-solution, c = {c}"),
            &rep,
            vec![(
                format!(
                    "{:?} case, lambda_F = {:.10}, lambda_M = {:.10}, roots {rf:.1e} / {rm:.1e}, y_F = {:.10}",
                    sub.case, sub.lambda_f, sub.lambda_m, sub.y_f
                ),
                rf.abs() < 1e-12 && rm.abs() < 1e-12 && sub.y_f < 0.0,
            )],
        ));
        csvio::write_profiles(&out.join(format!("profiles_sub_c{c}.csv")), &sub, &linspace(sub.window().0, sub.window().1, v.samples))?;

        let window = (sub.window().0, sup.window().1);
        let ord = verify_profile_ordering(&sub, &sup, window, v.samples, 1e-12);
        checks.push(CheckLine { name: format!("sub <= super profiles, c = {c}"), pass: ord.pass, detail: ord.to_string() });

        let sub_ref = &sub;
        let sup_ref = &sup;
        let (lower, upper) = rayon::join(
            || {
                wave_frame_run(cfg, sup_ref, &v.sandwich_grid, v.sandwich_t_end, &|x| {
                    sub_ref.jets(x, Side::Right).map(|j| j.v)
                })
            },
            || {
                wave_frame_run(cfg, sup_ref, &v.sandwich_grid, v.sandwich_t_end, &|x| {
                    sup_ref.jets(x, Side::Right).map(|j| j.v)
                })
            },
        );
        let (lower, upper) = (lower?, upper?);
        let ord = verify_ordering(&lower, &upper, v.ordering_tol);
        let (below, above) = sandwich_excursion(&lower, &sub, &sup);
        let ok = below <= v.ordering_tol && above <= v.ordering_tol;
        checks.push(CheckLine {
            name: format!("wave-frame runs stay ordered and sandwiched, c = {c}"),
            pass: ord.pass && ok,
            detail: format!("{ord}\nsub-started run: below sub {below:+.3e}, above super {above:+.3e} {}", verdict(ok)),
        });
    }

    let ms_a = match v.ms_amplitude {
        Some(a) => a,
        None => 1.1 * ms_edge_amplitude(v.ms_c_s, v.ms_eta, p, v.ms_speed)?,
    };
    let ms_grid = v.ms_grid.build()?;
    let scheme = SchemeConfig { t_end: v.ms_t_end, ..cfg.scheme };
    let ms = verify_ms_bound(p, v.ms_c_s, v.ms_eta, v.ms_speed, ms_a, MsInit::Steady, &ms_grid, &scheme, v.tol)?;
    checks.push(CheckLine {
        name: format!("sterile bound, C_s = {}, eta = {}, c = {}, A = {ms_a:.6}", v.ms_c_s, v.ms_eta, v.ms_speed),
        pass: ms.pass,
        detail: ms.to_string(),
    });

    let first_failure = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
    let rep = VerifyReport { pass: first_failure.is_none(), checks, first_failure };
    std::fs::write(out.join("verify_report.txt"), rep.to_string())?;
    write_json(&out.join("verify.json"), &rep)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub result: SearchResult,
    pub pass: bool,
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.result;
        writeln!(f, "critical {} = {:.6} in ({}, {})", r.parameter, r.value, r.lo, r.hi)?;
        writeln!(f, "  below: {}, above: {}", r.lo_kind, r.hi_kind)?;
        for s in &r.history {
            writeln!(
                f,
                "  #{:<3} probe {:<14.6} in ({:.6}, {:.6}) -> {}{}",
                s.iteration,
                s.probe,
                s.lo,
                s.hi,
                s.kind,
                if s.fallback { " (edge rule)" } else { "" }
            )?;
        }
        writeln!(f, "  endpoints re-verified: {}", verdict(r.endpoints_stable))?;
        if let Some(o) = &r.ordering {
            writeln!(f, "  {o}")?;
        }
        Ok(())
    }
}

pub fn run_search(cfg: &ExperimentConfig, out: &Path) -> Result<SearchReport> {
    let sc = &cfg.search;
    let result = match cfg.kind {
        ExperimentKind::SearchSpeed => {
            crate::wave::critical_speed(&cfg.params, sc.amplitude, sc.eta, &sc.settings, sc.bracket)?
        }
        _ => crate::wave::critical_amplitude(&cfg.params, sc.eta, sc.speed, &sc.settings, sc.bracket)?,
    };
    csvio::write_bracket_history(&out.join("bracket_history.csv"), &result.history)?;
    let pass = result.endpoints_stable && result.ordering.as_ref().is_none_or(|o| o.pass);
    let rep = SearchReport { result, pass };
    write_json(&out.join("search.json"), &rep)?;
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Simulate(SimulateReport),
    Figure1(Figure1Report),
    Speed(SpeedReport),
    Verify(VerifyReport),
    Search(SearchReport),
}

impl Report {
    pub fn pass(&self) -> bool {
        match self {
            Report::Simulate(_) => true,
            Report::Figure1(r) => r.pass,
            Report::Speed(r) => r.pass,
            Report::Verify(r) => r.pass,
            Report::Search(r) => r.pass,
        }
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Simulate(r) => r.fmt(f),
            Report::Figure1(r) => r.fmt(f),
            Report::Speed(r) => r.fmt(f),
            Report::Verify(r) => r.fmt(f),
            Report::Search(r) => r.fmt(f),
        }
    }
}

/// Validate `cfg`, create `out` and run the configured experiment on
/// `cfg.workers` threads.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    with_workers(cfg.workers, || match cfg.kind {
        ExperimentKind::Simulate => run_simulate(cfg, out).map(Report::Simulate),
        ExperimentKind::Figure1 => run_figure1(cfg, out).map(Report::Figure1),
        ExperimentKind::Speed => run_speed(cfg, out).map(Report::Speed),
        ExperimentKind::VerifyConstructions => run_verify(cfg, out).map(Report::Verify),
        ExperimentKind::SearchAmplitude | ExperimentKind::SearchSpeed => run_search(cfg, out).map(Report::Search),
    })?
}
