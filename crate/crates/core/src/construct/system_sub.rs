//! Sub-solution `(φ̲_E, φ̲_F, φ̲_M)` of the wave system at speed `c < 0`.

use serde::Serialize;

use super::{Jet, Side, WaveSystem};
use crate::error::{Error, Result};
use crate::model::Equilibrium;
use crate::ModelParams;

/// Eigenvalues closer than this are treated as equal.
pub const REPEATED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubCase {
    /// `λ_F⁺ ≠ λ_M⁺`: `M̂ = M* + a e^{λ_M x} + b₃ e^{λ_F x}`.
    Distinct,
    /// `λ_F⁺ = λ_M⁺ = λ`: `M̂ = M* + a x e^{λx} + b₃ e^{λx}`.
    Repeated,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemSub {
    pub params: ModelParams,
    pub eq: Equilibrium,
    pub c: f64,
    pub lambda_f: f64,
    pub lambda_m: f64,
    pub case: SubCase,
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// Zero of `F̂` on the negative axis.
    pub y_f: f64,
}

/// Positive root of `λ² + bλ + q` with `q < 0`, without cancellation.
fn positive_root(b: f64, q: f64) -> f64 {
    let disc = (b * b - 4.0 * q).sqrt();
    if b >= 0.0 {
        q / ((-b - disc) / 2.0)
    } else {
        (-b + disc) / 2.0
    }
}

impl SystemSub {
    pub fn new(c: f64, p: &ModelParams) -> Result<Self> {
        let eq = p.equilibrium()?;
        if !(c < 0.0) {
            return Err(Error::InvalidParameter(format!("speed must be negative, got {c}")));
        }
        let d = p.d;
        let ne = p.aquatic_exit();
        let lambda_f = positive_root(c / d - ne / c, -(ne + p.mu_f) / d);
        let lambda_m = positive_root(c / d, -p.mu_m / d);
        let b1 = -eq.e_star;
        let b2 = b1 * eq.f_star / eq.e_star * (1.0 - c * lambda_f / ne);
        let (case, a, b3) = if (lambda_f - lambda_m).abs() < REPEATED_TOL {
            let l = lambda_f;
            (SubCase::Repeated, -(1.0 - p.r) * p.nu_e * b1 / (c + 2.0 * d * l), -eq.m_star)
        } else {
            let pm = lambda_f * lambda_f + c / d * lambda_f - p.mu_m / d;
            let b3 = b1 * eq.m_star / eq.e_star * p.mu_m / (-d * pm);
            (SubCase::Distinct, -eq.m_star - b3, b3)
        };
        let mut ss = SystemSub { params: *p, eq, c, lambda_f, lambda_m, case, a, b1, b2, b3, y_f: 0.0 };
        ss.y_f = ss.find_y_f()?;
        Ok(ss)
    }

    /// `F̂(x) = F* + b₂ e^{λ_F x}` on the whole line.
    pub fn f_hat(&self, x: f64) -> Jet {
        Jet::constant(self.eq.f_star).add(Jet::exp(self.b2, self.lambda_f, x))
    }

    pub fn e_hat(&self, x: f64) -> Jet {
        Jet::constant(self.eq.e_star).add(Jet::exp(self.b1, self.lambda_f, x))
    }

    pub fn m_hat(&self, x: f64) -> Jet {
        let base = Jet::constant(self.eq.m_star);
        match self.case {
            SubCase::Distinct => {
                base.add(Jet::exp(self.a, self.lambda_m, x)).add(Jet::exp(self.b3, self.lambda_f, x))
            }
            SubCase::Repeated => {
                let l = self.lambda_f;
                let e = (l * x).exp();
                let xe = Jet { v: x * e, d1: e * (1.0 + l * x), d2: e * (2.0 * l + l * l * x) };
                base.add(Jet { v: self.a * xe.v, d1: self.a * xe.d1, d2: self.a * xe.d2 })
                    .add(Jet::exp(self.b3, l, x))
            }
        }
    }

    /// `P_F(λ_F⁺)` and `P_M(λ_M⁺)`, each divided by the sum of absolute term sizes.
    pub fn root_residuals(&self) -> [f64; 2] {
        let p = &self.params;
        let (c, d, ne) = (self.c, p.d, p.aquatic_exit());
        let rel = |l: f64, b: f64, q: f64| (l * l + b * l + q) / (l * l + (b * l).abs() + q.abs());
        [
            rel(self.lambda_f, c / d - ne / c, -(ne + p.mu_f) / d),
            rel(self.lambda_m, c / d, -p.mu_m / d),
        ]
    }

    fn find_y_f(&self) -> Result<f64> {
        let g = |x: f64| self.f_hat(x).v;
        if !(g(0.0) < 0.0) {
            return Err(Error::Numerical(format!("F̂(0) = {} is not negative", g(0.0))));
        }
        let step = 1.0 / self.lambda_f;
        let mut hi = 0.0;
        let mut lo = -step;
        while g(lo) <= 0.0 {
            hi = lo;
            lo -= step;
            if lo < -1e3 * step {
                return Err(Error::Numerical("no sign change of F̂ on the negative axis".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl WaveSystem for SystemSub {
    fn speed(&self) -> f64 {
        self.c
    }
    fn params(&self) -> &ModelParams {
        &self.params
    }
    fn jets(&self, x: f64, side: Side) -> [Jet; 3] {
        let left_of = |k: f64| x < k || (x == k && side == Side::Left);
        let e = if left_of(0.0) { self.e_hat(x) } else { Jet::ZERO };
        let f = if left_of(self.y_f) { self.f_hat(x) } else { Jet::ZERO };
        let m = if left_of(0.0) { self.m_hat(x) } else { Jet::ZERO };
        [e, f, m]
    }
    /// No release on the support of the sub-solution.
    fn control(&self, _x: f64) -> f64 {
        0.0
    }
    fn kinks(&self) -> Vec<(usize, f64)> {
        vec![(0, 0.0), (1, self.y_f), (2, 0.0)]
    }
    fn length_scale(&self) -> f64 {
        1.0 / self.lambda_f.max(self.lambda_m)
    }
    fn window(&self) -> (f64, f64) {
        (-40.0 / self.lambda_f.min(self.lambda_m), 10.0)
    }
}
