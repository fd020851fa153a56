//! Super-solution `(φ̄_E, φ̄_F, φ̄_M)` of the wave system at speed `c < 0`.

use serde::Serialize;

use super::{Jet, Side, WaveSystem};
use crate::error::{Error, Result};
use crate::model::Equilibrium;
use crate::quad;
use crate::release::{ms_edge_amplitude, ms_lower_bound_amplitude, ReleaseProfile};
use crate::ModelParams;

/// Default share `κ = αC_E/E*` of the mating-fraction cap.
pub const DEFAULT_KAPPA: f64 = 0.5;
const SAFETY_RATE: f64 = 0.9;
const SAFETY_AMPLITUDE: f64 = 1.1;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SystemSuper {
    pub params: ModelParams,
    pub eq: Equilibrium,
    pub c: f64,
    pub kappa: f64,
    /// The three upper bounds on `λ`.
    pub lambda_bounds: [f64; 3],
    pub lambda: f64,
    pub alpha: f64,
    pub c_e: f64,
    pub c_m: f64,
    /// Negative root of `Dδ² + cδ - μ_M`.
    pub delta_minus: f64,
    pub x_e: f64,
    pub x_m: f64,
    pub c_s_min: f64,
    pub c_s: f64,
    pub eta: f64,
}

impl SystemSuper {
    /// `kappa` fixes `αC_E/E*` in `(0, 1)`; `α` follows once `C_E` is known,
    /// so `α < E*/C_E` holds by construction.
    pub fn new(c: f64, p: &ModelParams, kappa: Option<f64>) -> Result<Self> {
        let eq = p.equilibrium()?;
        if !(c < 0.0) {
            return Err(Error::InvalidParameter(format!("speed must be negative, got {c}")));
        }
        let kappa = kappa.unwrap_or(DEFAULT_KAPPA);
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} outside (0, 1)")));
        }
        let d = p.d;
        let ne = p.aquatic_exit();
        let bounds = [
            -ne / c,
            (c + (c * c + 4.0 * d * p.mu_m).sqrt()) / (2.0 * d),
            (c + (c * c + 4.0 * d * p.mu_f * (1.0 - kappa)).sqrt()) / (2.0 * d),
        ];
        let lambda = SAFETY_RATE * bounds.iter().cloned().fold(f64::INFINITY, f64::min);
        let bf = p.beta * eq.f_star;
        let c_e = eq.e_star + (bf / c) * (-bf / (c * lambda * p.k)).exp() / (lambda + ne / c);
        if !c_e.is_finite() {
            return Err(Error::Numerical(format!("C_E overflows at c = {c}")));
        }
        let alpha = kappa * eq.e_star / c_e;
        let c_m = (1.0 - p.r) * p.nu_e * c_e / (-d * lambda * lambda + c * lambda + p.mu_m);
        let delta_minus = (-c - (c * c + 4.0 * d * p.mu_m).sqrt()) / (2.0 * d);
        let c_s_min = c_m / p.gamma * (1.0 / alpha - 1.0);
        let mut ss = SystemSuper {
            params: *p,
            eq,
            c,
            kappa,
            lambda_bounds: bounds,
            lambda,
            alpha,
            c_e,
            c_m,
            delta_minus,
            x_e: 0.0,
            x_m: 0.0,
            c_s_min,
            c_s: SAFETY_AMPLITUDE * c_s_min,
            eta: SAFETY_RATE * lambda,
        };
        ss.x_e = ss.find_x_e()?;
        ss.x_m = ss.find_x_m();
        Ok(ss)
    }

    fn big_b(&self) -> f64 {
        let p = &self.params;
        p.beta * self.eq.f_star / (self.lambda * self.c * p.k)
    }

    /// `δ(x) = B(1 - e^{-λx}) + (ν_E+μ_E)x/c`.
    pub fn delta(&self, x: f64) -> f64 {
        self.big_b() * -(-self.lambda * x).exp_m1() + self.params.aquatic_exit() / self.c * x
    }

    /// `φ̃_E(x)` from its integral representation; the integrand is
    /// `e^{-λs + δ(x) - δ(s)} ≤ 1`, so nothing overflows.
    pub fn phi_e_tilde(&self, x: f64) -> Result<f64> {
        let dx = self.delta(x);
        let lam = self.lambda;
        let j = quad::integrate(|s| (-lam * s + dx - self.delta(s)).exp(), 0.0, x, QUAD_TOL)?;
        let bf = self.params.beta * self.eq.f_star;
        Ok(self.eq.e_star * dx.exp() - bf / self.c * j)
    }

    /// Jet of `φ̃_E`, derivatives from the ODE it solves.
    pub fn phi_e_tilde_jet(&self, x: f64) -> Jet {
        let p = &self.params;
        let v = self.phi_e_tilde(x).unwrap_or(f64::NAN);
        let bf = p.beta * self.eq.f_star;
        let g = bf * (-self.lambda * x).exp();
        let d1 = (g * (1.0 - v / p.k) - p.aquatic_exit() * v) / -self.c;
        let d2 = (-self.lambda * g * (1.0 - v / p.k) - g * d1 / p.k - p.aquatic_exit() * d1) / -self.c;
        Jet { v, d1, d2 }
    }

    pub fn phi_m_tilde_jet(&self, x: f64) -> Jet {
        Jet::exp(self.c_m, -self.lambda, x).add(Jet::exp(self.eq.m_star - self.c_m, self.delta_minus, x))
    }

    fn find_x_e(&self) -> Result<f64> {
        let e_star = self.eq.e_star;
        let top = (self.c_e / e_star).ln() / self.lambda;
        let step = 0.1 / self.lambda;
        let mut x = top;
        while x > 0.0 {
            if self.phi_e_tilde(x)? >= e_star {
                return self.bisect_crossing(x, x + step, |y| Ok(self.phi_e_tilde(y)? - e_star));
            }
            x -= step;
        }
        Ok(0.0)
    }

    fn find_x_m(&self) -> f64 {
        let m_star = self.eq.m_star;
        let top = (self.c_m / m_star).ln() / self.lambda;
        let step = 0.1 / self.lambda;
        let f = |y: f64| Ok(self.phi_m_tilde_jet(y).v - m_star);
        let mut x = top;
        while x > 0.0 {
            if f(x).unwrap() >= 0.0 {
                return self.bisect_crossing(x, x + step, f).unwrap();
            }
            x -= step;
        }
        0.0
    }

    /// Root of `g` in `[lo, hi]` with `g(lo) ≥ 0 > g(hi)`.
    fn bisect_crossing<G: Fn(f64) -> Result<f64>>(&self, mut lo: f64, mut hi: f64, g: G) -> Result<f64> {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Release amplitude for which `M_s` stays above `C_s e^{-η(x-ct)}` all the
    /// way to the release edge, with the usual 10% margin.
    pub fn release_amplitude(&self) -> Result<f64> {
        let edge = ms_edge_amplitude(self.c_s, self.eta, &self.params, self.c)?;
        Ok(SAFETY_AMPLITUDE * edge.max(ms_lower_bound_amplitude(self.c_s, self.eta, &self.params, self.c)))
    }

    pub fn release_profile(&self) -> Result<ReleaseProfile> {
        ReleaseProfile::new(self.release_amplitude()?, self.eta, self.c)
    }
}

impl WaveSystem for SystemSuper {
    fn speed(&self) -> f64 {
        self.c
    }
    fn params(&self) -> &ModelParams {
        &self.params
    }
    fn jets(&self, x: f64, side: Side) -> [Jet; 3] {
        let left_of = |k: f64| x < k || (x == k && side == Side::Left);
        let e = if left_of(self.x_e) { Jet::constant(self.eq.e_star) } else { self.phi_e_tilde_jet(x) };
        let f = if left_of(0.0) { Jet::constant(self.eq.f_star) } else { Jet::exp(self.eq.f_star, -self.lambda, x) };
        let m = if left_of(self.x_m) { Jet::constant(self.eq.m_star) } else { self.phi_m_tilde_jet(x) };
        [e, f, m]
    }
    fn control(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.c_s * (-self.eta * x).exp()
        } else {
            0.0
        }
    }
    fn kinks(&self) -> Vec<(usize, f64)> {
        vec![(0, self.x_e), (1, 0.0), (2, self.x_m)]
    }
    fn length_scale(&self) -> f64 {
        1.0 / self.lambda
    }
    fn window(&self) -> (f64, f64) {
        (-50.0, self.x_m.max(self.x_e) + 40.0 / self.lambda)
    }
}
