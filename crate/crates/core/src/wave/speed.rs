use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, ScalarParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedResult {
    pub c_bar: f64,
    pub mu_bar: f64,
    pub gamma1_at_mu_bar: f64,
    pub condition_ok: bool,
}

/// `sqrt((Dμ² + ν_E + μ_E - μ_F)² + 4βrν_E)`, shared by `γ₁` and the positivity condition.
fn root_term(mu: f64, p: &ModelParams) -> f64 {
    let a = p.d * mu * mu + p.aquatic_exit() - p.mu_f;
    (a * a + 4.0 * p.beta * p.r * p.nu_e).sqrt()
}

/// Principal eigenvalue of the linearised (E, F) block at decay rate `mu`.
pub fn gamma1(mu: f64, p: &ModelParams) -> f64 {
    0.5 * (p.d * mu * mu - p.aquatic_exit() - p.mu_f + root_term(mu, p))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimise `γ₁(μ)/μ`: coarse geometric scan for a bracket, then golden section.
pub fn minimal_speed(p: &ModelParams) -> Result<SpeedResult> {
    p.validate()?;
    let r0 = p.offspring_number();
    if !(r0 > 1.0) {
        return Err(Error::Subcritical(r0));
    }
    let ratio = |mu: f64| gamma1(mu, p) / mu;

    let n = 400;
    let (lo_exp, hi_exp) = (-6.0f64, 6.0f64);
    let mus: Vec<f64> = (0..=n)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / n as f64))
        .collect();
    let (imin, _) = mus
        .iter()
        .map(|&m| ratio(m))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if imin == 0 || imin == n {
        return Err(Error::Numerical("minimum of gamma1(mu)/mu not bracketed".into()));
    }
    let (mut a, mut b) = (mus[imin - 1], mus[imin + 1]);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (ratio(x1), ratio(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = ratio(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = ratio(x2);
        }
    }
    let mu_bar = 0.5 * (a + b);
    let g = gamma1(mu_bar, p);
    let cond = 2.0 * p.mu_m - p.d * mu_bar * mu_bar - p.aquatic_exit() - p.mu_f + root_term(mu_bar, p);
    Ok(SpeedResult { c_bar: g / mu_bar, mu_bar, gamma1_at_mu_bar: g, condition_ok: cond > 0.0 })
}

/// `2 sqrt(β/δ - μ)`.
pub fn kpp_speed(s: &ScalarParams) -> Result<f64> {
    s.validate()?;
    Ok(2.0 * s.growth_rate().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma1_hand_value() {
        let p = ModelParams::default();
        let want = (0.5 - 0.23 + (0.53f64 * 0.53 + 1.6).sqrt()) / 2.0;
        assert_relative_eq!(gamma1(1.0, &p), want, epsilon = 1e-14);
        assert_relative_eq!(want, 0.82073, epsilon = 1e-5);
    }

    #[test]
    fn kpp_values() {
        assert_relative_eq!(kpp_speed(&ScalarParams::default()).unwrap(), 4.0);
        let s = ScalarParams { beta: 4.0, delta: 2.0, mu: 1.0, k: 10.0 };
        assert_relative_eq!(kpp_speed(&s).unwrap(), 2.0);
    }

    #[test]
    fn subcritical_rejected() {
        let p = ModelParams { beta: 0.325, ..Default::default() };
        assert!(matches!(minimal_speed(&p), Err(Error::Subcritical(_))));
    }
}
