//! Moving exponential release `Λ(t,x) = A e^{-η(x-ct)}` for `x - ct > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReleaseMode {
    #[default]
    MovingExponential,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReleaseProfile {
    #[serde(rename = "A")]
    pub a: f64,
    pub eta: f64,
    pub c: f64,
    pub mode: ReleaseMode,
}

impl Default for ReleaseProfile {
    fn default() -> Self {
        ReleaseProfile { a: 600.0, eta: 0.2, c: 0.0, mode: ReleaseMode::MovingExponential }
    }
}

impl ReleaseProfile {
    pub fn new(a: f64, eta: f64, c: f64) -> Result<Self> {
        let pr = ReleaseProfile { a, eta, c, mode: ReleaseMode::MovingExponential };
        pr.validate()?;
        Ok(pr)
    }

    pub fn off() -> Self {
        ReleaseProfile { a: 0.0, eta: 1.0, c: 0.0, mode: ReleaseMode::Off }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::InvalidParameter(format!("release amplitude must be >= 0, got {}", self.a)));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidParameter(format!("release decay eta must be > 0, got {}", self.eta)));
        }
        if !(self.c.is_finite() && self.c <= 0.0) {
            return Err(Error::InvalidParameter(format!("release speed c must be <= 0, got {}", self.c)));
        }
        Ok(())
    }

    /// True when the profile injects anything.
    pub fn is_active(&self) -> bool {
        self.mode == ReleaseMode::MovingExponential && self.a > 0.0
    }

    /// Profile in the moving coordinate `z = x - ct`; the edge `z = 0` is in the zero branch.
    #[inline]
    pub fn at_wave(&self, z: f64) -> f64 {
        if self.mode == ReleaseMode::Off || z <= 0.0 {
            0.0
        } else {
            self.a * (-self.eta * z).exp()
        }
    }

    #[inline]
    pub fn lambda_at(&self, t: f64, x: f64) -> f64 {
        self.at_wave(x - self.c * t)
    }

    /// Sterile insects released per day, `A/η`.
    pub fn release_mass(&self) -> f64 {
        if self.mode == ReleaseMode::Off {
            0.0
        } else {
            self.a / self.eta
        }
    }
}

/// Conservative amplitude `C_s (Dη² + |c|η + μ_s)` for which the release keeps
/// `M_s` above `C_s e^{-η(x-ct)}` away from the release edge.
pub fn ms_lower_bound_amplitude(c_s: f64, eta: f64, p: &ModelParams, c: f64) -> f64 {
    c_s * (p.d * eta * eta + c.abs() * eta + p.mu_s)
}

/// Steady profile `S(z)` of `M_s` in the frame moving with the release:
/// `-cS' - DS'' = A e^{-ηz} 1_{z>0} - μ_s S`, bounded on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SterileWave {
    /// Coefficient of `e^{-ηz}` for `z > 0`.
    pub p: f64,
    /// Coefficient of `e^{ρ₋ z}` for `z > 0`.
    pub q: f64,
    /// Decaying roots of `Dρ² + cρ - μ_s = 0`: `ρ₊ > 0` (used on `z < 0`) and `ρ₋ < 0`.
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub eta: f64,
}

impl SterileWave {
    pub fn new(p: &ModelParams, pr: &ReleaseProfile) -> Result<Self> {
        let (d, c, eta) = (p.d, pr.c, pr.eta);
        let disc = (c * c + 4.0 * d * p.mu_s).sqrt();
        let rho_plus = (-c + disc) / (2.0 * d);
        let rho_minus = (-c - disc) / (2.0 * d);
        let denom = c * eta - d * eta * eta + p.mu_s;
        if !(denom > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "no bounded sterile profile: c*eta - D*eta^2 + mu_s = {denom} <= 0"
            )));
        }
        let amp = if pr.mode == crate::release::ReleaseMode::Off { 0.0 } else { pr.a };
        let pp = amp / denom;
        let q = -(rho_plus + eta) * pp / (rho_plus - rho_minus);
        Ok(SterileWave { p: pp, q, rho_plus, rho_minus, eta })
    }

    pub fn at(&self, z: f64) -> f64 {
        if z <= 0.0 {
            (self.p + self.q) * (self.rho_plus * z).exp()
        } else {
            self.p * (-self.eta * z).exp() + self.q * (self.rho_minus * z).exp()
        }
    }
}

/// Amplitude at which the steady profile touches `C_s e^{-ηz}` exactly at the
/// release edge: `C_s (cη - Dη² + μ_s)(ρ₊ - ρ₋)/(-ρ₋ - η)`. Requires `η < -ρ₋`.
pub fn ms_edge_amplitude(c_s: f64, eta: f64, p: &ModelParams, c: f64) -> Result<f64> {
    let disc = (c * c + 4.0 * p.d * p.mu_s).sqrt();
    let rho_plus = (-c + disc) / (2.0 * p.d);
    let rho_minus = (-c - disc) / (2.0 * p.d);
    if !(eta < -rho_minus) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} must be below the sterile decay rate {}",
            -rho_minus
        )));
    }
    let denom = c * eta - p.d * eta * eta + p.mu_s;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter(format!("c*eta - D*eta^2 + mu_s = {denom} <= 0")));
    }
    Ok(c_s * denom * (rho_plus - rho_minus) / (-rho_minus - eta))
}
