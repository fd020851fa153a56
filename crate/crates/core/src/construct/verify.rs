//! Pointwise checks of the super-/sub-solution inequalities, of orderings, and
//! of the sterile lower bound.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fd;
use super::{Jet, ScalarWave, Side, WaveSystem};
use crate::error::Result;
use crate::release::{ReleaseProfile, SterileWave};
use crate::solver::{Grid, SchemeConfig, Simulator, StateField, SterileModel, Trajectory};
use crate::ModelParams;

/// Relative agreement required between analytic and finite-difference derivatives.
pub const FD_REL_TOL: f64 = 1e-5;
/// Finite-difference spacing as a fraction of the profile's length scale.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `-cφ' - Dφ'' - g(φ) ≥ 0`; at kinks the left slope is at least the right slope.
    Super,
    /// Reversed inequalities.
    Sub,
}

impl Inequality {
    fn margin(self, r: f64) -> f64 {
        match self {
            Inequality::Super => r,
            Inequality::Sub => -r,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationCheck {
    pub equation: &'static str,
    /// Smallest signed margin; negative means the inequality is violated.
    pub worst_margin: f64,
    pub at: f64,
    pub violations: usize,
    pub first_violation: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KinkCheck {
    pub component: &'static str,
    pub x: f64,
    pub value_jump: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    pub pass: bool,
}

/// Agreement of analytic derivatives with finite differences.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheck {
    pub component: &'static str,
    pub worst_d1: f64,
    pub worst_d2: f64,
    pub at: f64,
    /// Samples whose central stencil would straddle a kink (checked one-sidedly instead).
    pub kink_adjacent: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub kind: Inequality,
    pub tol: f64,
    pub samples: usize,
    pub window: (f64, f64),
    pub equations: Vec<EquationCheck>,
    pub kinks: Vec<KinkCheck>,
    pub derivatives: Vec<DerivativeCheck>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn worst_margin(&self) -> f64 {
        self.equations.iter().map(|e| e.worst_margin).fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |b: bool| if b { "pass" } else { "FAIL" };
        writeln!(
            f,
            "{:?} check on [{:.3}, {:.3}], {} samples, tol {:e}: {}",
            self.kind,
            self.window.0,
            self.window.1,
            self.samples,
            self.tol,
            verdict(self.pass)
        )?;
        for e in &self.equations {
            writeln!(
                f,
                "  eq {:<2} worst margin {:+.3e} at x = {:.4} ({} violations) {}",
                e.equation,
                e.worst_margin,
                e.at,
                e.violations,
                verdict(e.pass)
            )?;
        }
        for k in &self.kinks {
            writeln!(
                f,
                "  kink {:<2} x = {:.4}: jump {:.1e}, slopes {:+.4e} | {:+.4e} {}",
                k.component,
                k.x,
                k.value_jump,
                k.slope_left,
                k.slope_right,
                verdict(k.pass)
            )?;
        }
        for d in &self.derivatives {
            writeln!(
                f,
                "  fd   {:<2} d1 {:.1e}, d2 {:.1e} (worst at {:.4}, {} near kinks) {}",
                d.component,
                d.worst_d1,
                d.worst_d2,
                d.at,
                d.kink_adjacent,
                verdict(d.pass)
            )?;
        }
        Ok(())
    }
}

fn sample_range(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

struct Layout<'a> {
    components: &'a [&'static str],
    window: (f64, f64),
    kinks: Vec<(usize, f64)>,
    length_scale: f64,
}

fn check<J, R>(kind: Inequality, xs: &[f64], tol: f64, lay: Layout<'_>, jets: J, residuals: R) -> VerificationReport
where
    J: Fn(f64, Side) -> Vec<Jet> + Sync,
    R: Fn(f64, &[Jet]) -> Vec<f64> + Sync,
{
    let nc = lay.components.len();
    let n = xs.len();

    // Residuals at every sample, plus both branches at every kink.
    let mut points: Vec<(f64, Side)> = xs.iter().map(|&x| (x, Side::Right)).collect();
    for &(_, xk) in &lay.kinks {
        points.push((xk, Side::Left));
        points.push((xk, Side::Right));
    }
    let res: Vec<(f64, Vec<f64>)> = points.par_iter().map(|&(x, side)| (x, residuals(x, &jets(x, side)))).collect();
    let equations: Vec<EquationCheck> = (0..nc)
        .map(|i| {
            let mut worst = f64::INFINITY;
            let mut at = f64::NAN;
            let mut violations = 0;
            let mut first: Option<f64> = None;
            for (x, r) in &res {
                let m = kind.margin(r[i]);
                if m < worst || m.is_nan() {
                    worst = m;
                    at = *x;
                }
                if !(m >= -tol) {
                    violations += 1;
                    if first.is_none_or(|f| *x < f) {
                        first = Some(*x);
                    }
                }
            }
            EquationCheck { equation: lay.components[i], worst_margin: worst, at, violations, first_violation: first, pass: violations == 0 }
        })
        .collect();

    let kinks: Vec<KinkCheck> = lay
        .kinks
        .iter()
        .map(|&(i, xk)| {
            let l = jets(xk, Side::Left)[i];
            let r = jets(xk, Side::Right)[i];
            let jump = r.v - l.v;
            let slope_ok = match kind {
                Inequality::Super => l.d1 - r.d1 >= -tol,
                Inequality::Sub => r.d1 - l.d1 >= -tol,
            };
            let pass = jump.abs() <= tol * l.v.abs().max(1.0) && slope_ok;
            KinkCheck { component: lay.components[i], x: xk, value_jump: jump, slope_left: l.d1, slope_right: r.d1, pass }
        })
        .collect();

    let h = FD_STEP * lay.length_scale;
    let stencils: Vec<(Vec<Jet>, [Vec<f64>; 5])> = xs
        .par_iter()
        .map(|&x| {
            let vals = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| jets(x + k * h, Side::Right).iter().map(|j| j.v).collect());
            (jets(x, Side::Right), vals)
        })
        .collect();
    let derivatives = (0..nc)
        .map(|i| {
            let own: Vec<f64> = lay.kinks.iter().filter(|k| k.0 == i).map(|k| k.1).collect();
            let near = |x: f64| own.iter().any(|&k| (x - k).abs() <= 2.0 * h);
            let n1 = stencils.iter().map(|s| s.0[i].d1.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let n2 = stencils.iter().map(|s| s.0[i].d2.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let (mut w1, mut w2, mut at, mut skipped) = (0.0f64, 0.0f64, f64::NAN, 0);
            for (x, (jet, v)) in xs.iter().zip(&stencils) {
                if near(*x) {
                    skipped += 1;
                    continue;
                }
                let g = |y: f64| v[(((y - x) / h).round() as i64 + 2) as usize][i];
                let e1 = (fd::central_d1(&g, *x, h) - jet[i].d1).abs() / n1;
                let e2 = (fd::central_d2(&g, *x, h) - jet[i].d2).abs() / n2;
                if e1.max(e2) > w1.max(w2) {
                    at = *x;
                }
                w1 = w1.max(e1);
                w2 = w2.max(e2);
            }
            for &xk in &own {
                let vl = |y: f64| jets(y, Side::Left)[i].v;
                let vr = |y: f64| jets(y, Side::Right)[i].v;
                let el = (fd::left_d1(&vl, xk, h) - jets(xk, Side::Left)[i].d1).abs() / n1;
                let er = (fd::right_d1(&vr, xk, h) - jets(xk, Side::Right)[i].d1).abs() / n1;
                if el.max(er) > w1.max(w2) {
                    at = xk;
                }
                w1 = w1.max(el).max(er);
            }
            DerivativeCheck {
                component: lay.components[i],
                worst_d1: w1,
                worst_d2: w2,
                at,
                kink_adjacent: skipped,
                pass: w1 <= FD_REL_TOL && w2 <= FD_REL_TOL,
            }
        })
        .collect::<Vec<_>>();

    let pass = equations.iter().all(|e: &EquationCheck| e.pass)
        && kinks.iter().all(|k: &KinkCheck| k.pass)
        && derivatives.iter().all(|d| d.pass);
    VerificationReport { kind, tol, samples: n, window: lay.window, equations, kinks, derivatives, pass }
}

/// Check a system profile on `n` evenly spaced samples of its window.
pub fn verify_system<W: WaveSystem + Sync>(w: &W, kind: Inequality, n: usize, tol: f64) -> VerificationReport {
    verify_system_on(w, kind, w.window(), n, tol)
}

pub fn verify_system_on<W: WaveSystem + Sync>(
    w: &W,
    kind: Inequality,
    window: (f64, f64),
    n: usize,
    tol: f64,
) -> VerificationReport {
    verify_system_at(w, kind, &linspace(window.0, window.1, n), tol)
}

/// Check a system profile at arbitrary sample points.
pub fn verify_system_at<W: WaveSystem + Sync>(w: &W, kind: Inequality, xs: &[f64], tol: f64) -> VerificationReport {
    let p = *w.params();
    let c = w.speed();
    let window = sample_range(xs);
    let lay = Layout { components: &["E", "F", "M"], window, kinks: w.kinks(), length_scale: w.length_scale() };
    check(
        kind,
        xs,
        tol,
        lay,
        |x, side| w.jets(x, side).to_vec(),
        |x, j| {
            let [re, rf, rm] = p.reaction(j[0].v, j[1].v, j[2].v, w.control(x));
            vec![-c * j[0].d1 - re, -c * j[1].d1 - p.d * j[1].d2 - rf, -c * j[2].d1 - p.d * j[2].d2 - rm]
        },
    )
}

/// Scalar counterpart of [`verify_system`] (unit diffusion).
pub fn verify_scalar<W: ScalarWave + Sync>(w: &W, kind: Inequality, n: usize, tol: f64) -> VerificationReport {
    let (a, b) = w.window();
    verify_scalar_at(w, kind, &linspace(a, b, n), tol)
}

pub fn verify_scalar_at<W: ScalarWave + Sync>(w: &W, kind: Inequality, xs: &[f64], tol: f64) -> VerificationReport {
    let s = *w.params();
    let c = w.speed();
    let kinks = w.kinks().into_iter().map(|k| (0, k)).collect();
    let lay = Layout { components: &["u"], window: sample_range(xs), kinks, length_scale: w.length_scale() };
    check(
        kind,
        xs,
        tol,
        lay,
        |x, side| vec![w.jet(x, side)],
        |x, j| vec![-c * j[0].d1 - j[0].d2 - s.reaction(j[0].v, w.control(x))],
    )
}

/// Worst ordering violation between two solutions or profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub pass: bool,
    pub tol: f64,
    /// Largest `(lower - upper)/scale`; non-positive when ordered.
    pub worst: f64,
    pub t: f64,
    pub x: f64,
    pub component: String,
    pub compared: usize,
}

impl fmt::Display for OrderingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ordering over {} snapshots: worst {:+.3e} ({} at t = {}, x = {}) {}",
            self.compared,
            self.worst,
            self.component,
            self.t,
            self.x,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Component-wise `lower ≤ upper` for `E, F, M` at every snapshot, relative to
/// each component's largest value over both runs.
pub fn verify_ordering(lower: &Trajectory, upper: &Trajectory, tol: f64) -> OrderingReport {
    let mismatch = lower.grid != upper.grid
        || lower.snapshots.len() != upper.snapshots.len()
        || lower.snapshots.iter().zip(&upper.snapshots).any(|(a, b)| (a.t - b.t).abs() > 1e-9);
    if mismatch {
        return OrderingReport {
            pass: false,
            tol,
            worst: f64::INFINITY,
            t: f64::NAN,
            x: f64::NAN,
            component: "grid or snapshot mismatch".into(),
            compared: 0,
        };
    }
    let names = ["E", "F", "M"];
    let pick = |s: &StateField, c: usize| -> Vec<f64> {
        match c {
            0 => s.e.clone(),
            1 => s.f.clone(),
            _ => s.m.clone(),
        }
    };
    let mut scale = [0.0f64; 3];
    for s in lower.snapshots.iter().chain(&upper.snapshots) {
        for (c, sc) in scale.iter_mut().enumerate() {
            *sc = pick(s, c).iter().cloned().fold(*sc, f64::max);
        }
    }
    let mut rep = OrderingReport {
        pass: true,
        tol,
        worst: f64::NEG_INFINITY,
        t: f64::NAN,
        x: f64::NAN,
        component: String::new(),
        compared: lower.snapshots.len(),
    };
    for (a, b) in lower.snapshots.iter().zip(&upper.snapshots) {
        for (c, name) in names.iter().enumerate() {
            let (la, ub) = (pick(a, c), pick(b, c));
            let sc = scale[c].max(f64::MIN_POSITIVE);
            for (i, (l, u)) in la.iter().zip(&ub).enumerate() {
                let d = (l - u) / sc;
                if d > rep.worst {
                    rep.worst = d;
                    rep.t = a.t;
                    rep.x = lower.grid.x(i);
                    rep.component = name.to_string();
                }
            }
        }
    }
    rep.pass = rep.worst <= tol;
    rep
}

/// `lower ≤ upper` for two wave profiles on `n` samples of `window`, relative
/// to the largest value of each component of `upper`.
pub fn verify_profile_ordering<L: WaveSystem + Sync, U: WaveSystem + Sync>(
    lower: &L,
    upper: &U,
    window: (f64, f64),
    n: usize,
    tol: f64,
) -> OrderingReport {
    let xs = linspace(window.0, window.1, n);
    let vals: Vec<([Jet; 3], [Jet; 3])> =
        xs.par_iter().map(|&x| (lower.jets(x, Side::Right), upper.jets(x, Side::Right))).collect();
    let names = ["E", "F", "M"];
    let mut scale = [f64::MIN_POSITIVE; 3];
    for (_, u) in &vals {
        for c in 0..3 {
            scale[c] = scale[c].max(u[c].v.abs());
        }
    }
    let mut rep = OrderingReport {
        pass: true,
        tol,
        worst: f64::NEG_INFINITY,
        t: 0.0,
        x: f64::NAN,
        component: String::new(),
        compared: n,
    };
    for (x, (l, u)) in xs.iter().zip(&vals) {
        for c in 0..3 {
            let d = (l[c].v - u[c].v) / scale[c];
            if d > rep.worst {
                rep.worst = d;
                rep.x = *x;
                rep.component = names[c].to_string();
            }
        }
    }
    rep.pass = rep.worst <= tol;
    rep
}

/// Initial sterile density for [`verify_ms_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MsInit {
    /// The barrier itself, `C_s e^{-ηx}` on `x ≥ 0`.
    Barrier,
    /// The steady moving-frame profile generated by the release.
    Steady,
}

#[derive(Debug, Clone, Serialize)]
pub struct MsBoundReport {
    pub pass: bool,
    pub tol: f64,
    /// Smallest `(M_s - C_s e^{-ηz})/C_s` over `z = x - ct ≥ 0`.
    pub worst_deficit: f64,
    pub worst_at: (f64, f64),
    /// Earliest `(t, x)` with a deficit beyond `tol`.
    pub first_violation: Option<(f64, f64)>,
    pub violations: usize,
    /// Largest `z` at which a violation occurred; shows whether failures stay
    /// in a layer at the release edge.
    pub max_violation_z: Option<f64>,
    pub snapshots: usize,
}

impl fmt::Display for MsBoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sterile bound over {} snapshots: worst deficit {:+.3e} at (t, x) = ({}, {}), {} violations{} {}",
            self.snapshots,
            self.worst_deficit,
            self.worst_at.0,
            self.worst_at.1,
            self.violations,
            match self.max_violation_z {
                Some(z) => format!(" up to z = {z:.3}"),
                None => String::new(),
            },
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Simulate the sterile equation alone under `A e^{-η(x-ct)}` and check
/// `M_s ≥ C_s e^{-η(x-ct)}` on `x - ct ≥ 0` at every snapshot, to `tol·C_s`.
#[allow(clippy::too_many_arguments)]
pub fn verify_ms_bound(
    p: &ModelParams,
    c_s: f64,
    eta: f64,
    c: f64,
    a: f64,
    init: MsInit,
    grid: &Grid,
    cfg: &SchemeConfig,
    tol: f64,
) -> Result<MsBoundReport> {
    let pr = ReleaseProfile::new(a, eta, c)?;
    let mut state = StateField::zeros(grid);
    match init {
        MsInit::Barrier => {
            for (i, ms) in state.ms.iter_mut().enumerate() {
                let x = grid.x(i);
                *ms = if x >= 0.0 { c_s * (-eta * x).exp() } else { 0.0 };
            }
        }
        MsInit::Steady => {
            let sw = SterileWave::new(p, &pr)?;
            for (i, ms) in state.ms.iter_mut().enumerate() {
                *ms = sw.at(grid.x(i));
            }
        }
    }
    let sim = Simulator::new(grid.clone(), *p, pr, *cfg, SterileModel::Dynamic, 0.0)?;
    let mut rep = MsBoundReport {
        pass: true,
        tol,
        worst_deficit: f64::INFINITY,
        worst_at: (f64::NAN, f64::NAN),
        first_violation: None,
        violations: 0,
        max_violation_z: None,
        snapshots: 0,
    };
    sim.run(&state, |s| {
        rep.snapshots += 1;
        for (i, &ms) in s.ms.iter().enumerate() {
            let x = grid.x(i);
            let z = x - c * s.t;
            if z < 0.0 {
                continue;
            }
            let d = (ms - c_s * (-eta * z).exp()) / c_s;
            if d < rep.worst_deficit {
                rep.worst_deficit = d;
                rep.worst_at = (s.t, x);
            }
            if d < -tol {
                rep.violations += 1;
                if rep.first_violation.is_none() {
                    rep.first_violation = Some((s.t, x));
                }
                rep.max_violation_z = Some(rep.max_violation_z.map_or(z, |m: f64| m.max(z)));
            }
        }
    })?;
    rep.pass = rep.violations == 0;
    Ok(rep)
}
