//! Scalar super-solution `w̄` and sub-solution `w̲`.

use serde::Serialize;

use super::{Jet, ScalarWave, Side};
use crate::error::{Error, Result};
use crate::quad;
use crate::ScalarParams;

/// `w̄ = u*` on `x < 0`, `u* e^{r(α)x}` on `x ≥ 0`, with release
/// `A e^{-ηx}` on `x ≥ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarSuper {
    pub params: ScalarParams,
    pub c: f64,
    pub alpha: f64,
    /// Negative root of `r² + cr + αβ/δ - μ`.
    pub r_alpha: f64,
    /// `u*/α - u*`.
    pub a_min: f64,
    pub u_star: f64,
    /// Control actually imposed; defaults to `(A_min, -r(α))`.
    pub amplitude: f64,
    pub eta: f64,
}

impl ScalarSuper {
    pub fn new(c: f64, alpha: f64, s: &ScalarParams) -> Result<Self> {
        s.validate()?;
        if !(c < 0.0) {
            return Err(Error::InvalidParameter(format!("speed must be negative, got {c}")));
        }
        let alpha_max = s.delta * s.mu / s.beta;
        if !(alpha > 0.0 && alpha < alpha_max) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, {alpha_max})")));
        }
        let q = alpha * s.beta / s.delta - s.mu;
        let r_alpha = (-c - (c * c - 4.0 * q).sqrt()) / 2.0;
        let u_star = s.equilibrium()?;
        let a_min = u_star / alpha - u_star;
        Ok(ScalarSuper { params: *s, c, alpha, r_alpha, a_min, u_star, amplitude: a_min, eta: -r_alpha })
    }

    /// Same profile, different control. No admissibility check, so negative
    /// controls can be built on purpose.
    pub fn with_control(mut self, amplitude: f64, eta: f64) -> Self {
        self.amplitude = amplitude;
        self.eta = eta;
        self
    }

    /// `r² + cr + αβ/δ - μ` at `r(α)`.
    pub fn root_residual(&self) -> f64 {
        let s = &self.params;
        let r = self.r_alpha;
        r * r + self.c * r + self.alpha * s.beta / s.delta - s.mu
    }
}

impl ScalarWave for ScalarSuper {
    fn speed(&self) -> f64 {
        self.c
    }
    fn params(&self) -> &ScalarParams {
        &self.params
    }
    fn jet(&self, x: f64, side: Side) -> Jet {
        if x < 0.0 || (x == 0.0 && side == Side::Left) {
            Jet::constant(self.u_star)
        } else {
            Jet::exp(self.u_star, self.r_alpha, x)
        }
    }
    fn control(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.amplitude * (-self.eta * x).exp()
        } else {
            0.0
        }
    }
    fn kinks(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn length_scale(&self) -> f64 {
        1.0 / self.r_alpha.abs()
    }
    fn window(&self) -> (f64, f64) {
        (-20.0, (30.0 / self.r_alpha.abs()).max(60.0))
    }
}

/// Solution of `-w'' = f(w)` on `x < 0` with `w(0) = 0` and
/// `w'(0) = -√(2∫₀^{u*} f)`, extended by zero on `x ≥ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarSub {
    pub params: ScalarParams,
    pub c: f64,
    pub u_star: f64,
    /// `∫₀^{u*} f` by adaptive quadrature.
    pub energy: f64,
    pub step: f64,
    /// Node `i` sits at `x = -i·step`.
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    /// Decay rate `√|f'(u*)|` of the exponential tail used beyond the last node.
    pub tail_rate: f64,
}

const SUB_STEP: f64 = 1e-3;
const TAIL_GAP: f64 = 1e-7;

impl ScalarSub {
    pub fn new(c: f64, s: &ScalarParams) -> Result<Self> {
        let u_star = s.equilibrium()?;
        if !(c < 0.0) {
            return Err(Error::InvalidParameter(format!("speed must be negative, got {c}")));
        }
        let energy = quad::integrate(|u| s.f(u), 0.0, u_star, 1e-10)?;
        let mut w = vec![0.0];
        let mut dw = vec![-(2.0 * energy).sqrt()];
        let h = -SUB_STEP;
        let rhs = |y: [f64; 2]| [y[1], -s.f(y[0])];
        loop {
            let y = [*w.last().unwrap(), *dw.last().unwrap()];
            let y1 = rk4(&rhs, y, h);
            if !(y1[1] < 0.0 && y1[0] < u_star) {
                // Separatrix lost to rounding: stop here and use the tail.
                break;
            }
            w.push(y1[0]);
            dw.push(y1[1]);
            if u_star - y1[0] <= TAIL_GAP * u_star {
                break;
            }
            if w.len() > 10_000_000 {
                return Err(Error::Numerical("scalar sub-solution did not approach u*".into()));
            }
        }
        for i in 1..w.len() {
            if !(w[i] > w[i - 1]) {
                return Err(Error::Numerical(format!("sub-solution not monotone at node {i}")));
            }
        }
        let fp = s.beta * s.delta / (s.beta * u_star / s.k + s.delta).powi(2) - s.mu;
        Ok(ScalarSub { params: *s, c, u_star, energy, step: SUB_STEP, w, dw, tail_rate: (-fp).sqrt() })
    }

    /// Leftmost integrated point.
    pub fn x_last(&self) -> f64 {
        -((self.w.len() - 1) as f64) * self.step
    }

    /// Largest `|w'²/2 - ∫_w^{u*} f| / ∫₀^{u*} f` over the integrated nodes.
    pub fn energy_defect(&self) -> f64 {
        let s = &self.params;
        let total = s.f_primitive(self.u_star);
        self.w
            .iter()
            .zip(&self.dw)
            .map(|(&w, &p)| (0.5 * p * p - (total - s.f_primitive(w))).abs() / total)
            .fold(0.0, f64::max)
    }
}

fn rk4<F: Fn([f64; 2]) -> [f64; 2]>(rhs: &F, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = rhs(y);
    let k2 = rhs(add(y, k1, 0.5 * h));
    let k3 = rhs(add(y, k2, 0.5 * h));
    let k4 = rhs(add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

impl ScalarWave for ScalarSub {
    fn speed(&self) -> f64 {
        self.c
    }
    fn params(&self) -> &ScalarParams {
        &self.params
    }
    fn jet(&self, x: f64, side: Side) -> Jet {
        if x > 0.0 || (x == 0.0 && side == Side::Right) {
            return Jet::ZERO;
        }
        let s = &self.params;
        let last = self.w.len() - 1;
        let x_last = self.x_last();
        if x < x_last {
            let gap = self.u_star - self.w[last];
            let k = self.tail_rate;
            let e = gap * (k * (x - x_last)).exp();
            return Jet { v: self.u_star - e, d1: -k * e, d2: -k * k * e };
        }
        let i = ((-x / self.step).floor() as usize).min(last);
        let xi = -(i as f64) * self.step;
        let (w, p) = if x == xi {
            (self.w[i], self.dw[i])
        } else {
            let y = rk4(&|y: [f64; 2]| [y[1], -s.f(y[0])], [self.w[i], self.dw[i]], x - xi);
            (y[0], y[1])
        };
        Jet { v: w, d1: p, d2: -s.f(w) }
    }
    fn control(&self, _x: f64) -> f64 {
        0.0
    }
    fn kinks(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn length_scale(&self) -> f64 {
        1.0 / self.tail_rate
    }
    fn window(&self) -> (f64, f64) {
        (self.x_last() - 5.0 / self.tail_rate, 10.0)
    }
}
