//! Biological parameters, reaction terms and equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the four-compartment model. Defaults reproduce the
/// reference parameter table (days, km).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub beta: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "nu_E")]
    pub nu_e: f64,
    #[serde(rename = "mu_E")]
    pub mu_e: f64,
    #[serde(rename = "mu_F")]
    pub mu_f: f64,
    #[serde(rename = "mu_M")]
    pub mu_m: f64,
    pub mu_s: f64,
    pub gamma: f64,
    pub r: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            beta: 10.0,
            k: 200.0,
            nu_e: 0.08,
            mu_e: 0.05,
            mu_f: 0.1,
            mu_m: 0.14,
            mu_s: 0.14,
            gamma: 1.0,
            r: 0.5,
            d: 0.5,
        }
    }
}

/// Point values of the four unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Densities {
    pub e: f64,
    pub f: f64,
    pub m: f64,
    pub ms: f64,
}

/// Positive steady state of the uncontrolled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub e_star: f64,
    pub f_star: f64,
    pub m_star: f64,
}

impl Equilibrium {
    pub fn max_component(&self) -> f64 {
        self.e_star.max(self.f_star).max(self.m_star)
    }
}

/// `M / (M + γ Ms)`, taken as 0 when `M = 0`.
#[inline]
pub fn mating_fraction(m: f64, ms: f64, gamma: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else {
        m / (m + gamma * ms)
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("beta", self.beta),
            ("K", self.k),
            ("nu_E", self.nu_e),
            ("mu_E", self.mu_e),
            ("mu_F", self.mu_f),
            ("mu_M", self.mu_m),
            ("mu_s", self.mu_s),
            ("gamma", self.gamma),
            ("D", self.d),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidParameter(format!("r must lie in (0, 1), got {}", self.r)));
        }
        Ok(())
    }

    /// Basic offspring number `β r ν_E / (μ_F (ν_E + μ_E))`.
    pub fn offspring_number(&self) -> f64 {
        self.beta * self.r * self.nu_e / (self.mu_f * (self.nu_e + self.mu_e))
    }

    /// `(ν_E + μ_E)`, the total exit rate of the aquatic phase.
    #[inline]
    pub fn aquatic_exit(&self) -> f64 {
        self.nu_e + self.mu_e
    }

    pub fn equilibrium(&self) -> Result<Equilibrium> {
        let r0 = self.offspring_number();
        if !(r0 > 1.0) {
            return Err(Error::Subcritical(r0));
        }
        let brn = self.beta * self.r * self.nu_e;
        let gap = brn - self.mu_f * self.aquatic_exit();
        Ok(Equilibrium {
            e_star: self.k * gap / brn,
            f_star: self.k * gap / (self.beta * self.mu_f),
            m_star: self.k * (1.0 - self.r) / self.r * gap / (self.beta * self.mu_m),
        })
    }

    /// Right-hand sides of the E, F, M equations (no diffusion).
    pub fn reaction(&self, e: f64, f: f64, m: f64, ms: f64) -> [f64; 3] {
        let de = self.beta * f * (1.0 - e / self.k) - self.aquatic_exit() * e;
        let df = self.r * self.nu_e * e * mating_fraction(m, ms, self.gamma) - self.mu_f * f;
        let dm = (1.0 - self.r) * self.nu_e * e - self.mu_m * m;
        [de, df, dm]
    }

    /// Row-sum bound on the reaction Jacobian over `[0,K] x [0,f_max] x R+ x R+`,
    /// with the mating fraction treated as a coefficient in `[0, 1]`.
    pub fn reaction_lipschitz(&self, f_max: f64) -> f64 {
        let row_e = self.beta * f_max / self.k + self.aquatic_exit() + self.beta;
        let row_f = self.r * self.nu_e + self.mu_f;
        let row_m = (1.0 - self.r) * self.nu_e + self.mu_m;
        row_e.max(row_f).max(row_m).max(self.mu_s)
    }
}

/// Constants of the single-equation analogue
/// `u_t - u_xx = u/(u+Λ) · βu/(βu/K + δ) - μu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalarParams {
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl Default for ScalarParams {
    /// Illustrative values; the reference text gives none for this model.
    fn default() -> Self {
        ScalarParams { beta: 10.0, delta: 2.0, mu: 1.0, k: 200.0 }
    }
}

impl ScalarParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("delta", self.delta), ("mu", self.mu), ("K", self.k)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.beta - self.mu * self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need beta - mu*delta > 0, got {}",
                self.beta - self.mu * self.delta
            )));
        }
        Ok(())
    }

    pub fn equilibrium(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.k * (self.beta - self.mu * self.delta) / (self.beta * self.mu))
    }

    /// Birth term `βu/(βu/K + δ)`.
    #[inline]
    pub fn birth(&self, u: f64) -> f64 {
        self.beta * u / (self.beta * u / self.k + self.delta)
    }

    pub fn reaction(&self, u: f64, lam: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        u / (u + lam) * self.birth(u) - self.mu * u
    }

    /// Uncontrolled reaction `f(u) = βu/(βu/K + δ) - μu`.
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        self.birth(u) - self.mu * u
    }

    /// Linear growth rate at zero, `β/δ - μ`.
    pub fn growth_rate(&self) -> f64 {
        self.beta / self.delta - self.mu
    }

    /// Closed form of `∫_0^u f(s) ds`.
    pub fn f_primitive(&self, u: f64) -> f64 {
        let (b, k, d) = (self.beta, self.k, self.delta);
        k * u - k * k * d / b * (b * u / (k * d)).ln_1p() - 0.5 * self.mu * u * u
    }
}
