use approx::assert_relative_eq;
use proptest::prelude::*;
use sit_core::model::mating_fraction;
use sit_core::release::ms_lower_bound_amplitude;
use sit_core::{Error, ModelParams, ReleaseProfile, ScalarParams};

#[test]
fn default_offspring_number_and_equilibrium() {
    let p = ModelParams::default();
    // R = beta r nu_E / (mu_F (nu_E + mu_E)) = 0.4 / 0.013
    assert_relative_eq!(p.offspring_number(), 400.0 / 13.0, max_relative = 1e-14);
    let eq = p.equilibrium().unwrap();
    // E* = K(1 - 1/R); F*, M* from the steady F and M equations without sterile males.
    let e = p.k * (1.0 - 1.0 / p.offspring_number());
    assert_relative_eq!(eq.e_star, e, max_relative = 1e-12);
    assert_relative_eq!(eq.f_star, p.r * p.nu_e * e / p.mu_f, max_relative = 1e-12);
    assert_relative_eq!(eq.m_star, (1.0 - p.r) * p.nu_e * e / p.mu_m, max_relative = 1e-12);
    assert!((eq.e_star - 193.5).abs() < 1e-9);
    assert!((eq.f_star - 77.4).abs() < 1e-9);
    assert!((eq.m_star - 55.285_714_285_714_29).abs() < 1e-9);
    let r = p.reaction(eq.e_star, eq.f_star, eq.m_star, 0.0);
    assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");
}

#[test]
fn threshold_offspring_number_rejected() {
    let p = ModelParams { beta: 0.325, ..Default::default() };
    assert!(matches!(p.equilibrium(), Err(Error::Subcritical(_))));
    let p = ModelParams { beta: 0.3, ..Default::default() };
    assert!(matches!(p.equilibrium(), Err(Error::Subcritical(_))));
}

#[test]
fn equilibrium_linear_in_k() {
    let a = ModelParams::default().equilibrium().unwrap();
    let b = ModelParams { k: 400.0, ..Default::default() }.equilibrium().unwrap();
    assert_relative_eq!(b.e_star, 2.0 * a.e_star, max_relative = 1e-14);
    assert_relative_eq!(b.f_star, 2.0 * a.f_star, max_relative = 1e-14);
    assert_relative_eq!(b.m_star, 2.0 * a.m_star, max_relative = 1e-14);
}

#[test]
fn reaction_examples() {
    let p = ModelParams::default();
    assert_eq!(p.reaction(0.0, 0.0, 0.0, 5.0), [0.0, 0.0, 0.0]);
    let [_, df, _] = p.reaction(100.0, 50.0, 30.0, 30.0);
    assert_relative_eq!(df, 0.5 * 0.08 * 100.0 * 0.5 - 0.1 * 50.0, epsilon = 1e-12);
    assert_eq!(mating_fraction(0.0, 0.0, 1.0), 0.0);
    assert_eq!(mating_fraction(0.0, 3.0, 1.0), 0.0);
}

#[test]
fn scalar_examples() {
    let s = ScalarParams::default();
    let u = s.equilibrium().unwrap();
    assert_relative_eq!(u, 160.0, max_relative = 1e-14);
    assert!(s.f(u).abs() < 1e-12);
    assert_relative_eq!(s.reaction(1.0, 0.0), 10.0 / (10.0 / 200.0 + 2.0) - 1.0, max_relative = 1e-14);
    assert_relative_eq!(s.reaction(1.0, 0.0), 3.878_048_780_487_8, max_relative = 1e-12);
    assert_eq!(s.reaction(0.0, 7.0), 0.0);
    assert_eq!(s.reaction(0.0, 0.0), 0.0);
    assert!(s.reaction(u, 0.0).abs() < 1e-12);
    let tripled = ScalarParams { k: 600.0, ..s };
    assert_relative_eq!(tripled.equilibrium().unwrap(), 3.0 * u, max_relative = 1e-14);
    assert!(ScalarParams { beta: 2.0, ..s }.equilibrium().is_err());
}

#[test]
fn release_examples() {
    let pr = ReleaseProfile::new(600.0, 0.2, 0.0).unwrap();
    assert_eq!(pr.lambda_at(17.0, 0.0), 0.0);
    let pr = ReleaseProfile::new(600.0, 0.2, -0.3).unwrap();
    assert_relative_eq!(pr.lambda_at(10.0, 0.0), 329.286_981_656_629_6, max_relative = 1e-12);
    assert_relative_eq!(pr.release_mass(), 3000.0, max_relative = 1e-14);
    assert_eq!(ReleaseProfile::new(0.0, 0.2, -0.3).unwrap().release_mass(), 0.0);
    let half = ReleaseProfile::new(600.0, 0.4, -0.3).unwrap();
    assert_relative_eq!(half.release_mass(), 1500.0, max_relative = 1e-14);
    let off = ReleaseProfile::off();
    assert_eq!(off.lambda_at(3.0, 5.0), 0.0);
    assert_eq!(off.release_mass(), 0.0);
    assert!(ReleaseProfile::new(600.0, 0.2, 0.1).is_err());
    assert!(ReleaseProfile::new(-1.0, 0.2, 0.0).is_err());
    assert!(ReleaseProfile::new(600.0, 0.0, 0.0).is_err());
}

#[test]
fn release_mass_matches_quadrature() {
    let pr = ReleaseProfile::new(600.0, 0.2, -0.3).unwrap();
    let t = 7.0;
    let edge = pr.c * t;
    let total = sit_core::quad::integrate(|x| pr.lambda_at(t, x), edge, edge + 40.0 / pr.eta, 1e-10).unwrap();
    assert!((total / pr.release_mass() - 1.0).abs() < 1e-6);
}

#[test]
fn conservative_amplitude_examples() {
    let p = ModelParams::default();
    assert_relative_eq!(ms_lower_bound_amplitude(100.0, 0.2, &p, -0.3), 22.0, max_relative = 1e-14);
    assert_relative_eq!(ms_lower_bound_amplitude(100.0, 0.0, &p, 0.0), 100.0 * p.mu_s, max_relative = 1e-14);
    assert_eq!(ms_lower_bound_amplitude(0.0, 0.2, &p, -0.3), 0.0);
}

fn state() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..200.0f64, 0.0..200.0f64, 0.0..200.0f64, 0.0..500.0f64)
}

proptest! {
    #[test]
    fn reaction_monotone_in_cross_terms((e, f, m, ms) in state(), de in 0.0..50.0f64, df in 0.0..50.0f64, dm in 0.0..50.0f64, dms in 0.0..50.0f64) {
        let p = ModelParams::default();
        let e2 = (e + de).min(p.k);
        let e = e.min(e2);
        let a = p.reaction(e, f, m, ms);
        // dE/dt nondecreasing in F.
        prop_assert!(p.reaction(e, f + df, m, ms)[0] >= a[0] - 1e-12);
        // dF/dt nondecreasing in E and M, nonincreasing in Ms.
        prop_assert!(p.reaction(e2, f, m, ms)[1] >= a[1] - 1e-12);
        prop_assert!(p.reaction(e, f, m + dm, ms)[1] >= a[1] - 1e-12);
        prop_assert!(p.reaction(e, f, m, ms + dms)[1] <= a[1] + 1e-12);
        // dM/dt nondecreasing in E.
        prop_assert!(p.reaction(e2, f, m, ms)[2] >= a[2] - 1e-12);
    }

    #[test]
    fn scalar_reaction_is_sublinear(u in 1e-6..1e4f64) {
        let s = ScalarParams::default();
        prop_assert!(s.reaction(u, 0.0) < s.growth_rate() * u);
    }

    #[test]
    fn release_is_a_travelling_profile(t in 0.0..400.0f64, x in -300.0..300.0f64, c in -1.0..0.0f64) {
        let pr = ReleaseProfile::new(600.0, 0.2, c).unwrap();
        prop_assert_eq!(pr.lambda_at(t, x), pr.lambda_at(0.0, x - c * t));
    }

    #[test]
    fn release_nonincreasing_in_x(t in 0.0..400.0f64, x in -300.0..300.0f64, dx in 0.0..10.0f64) {
        let pr = ReleaseProfile::new(600.0, 0.2, -0.3).unwrap();
        prop_assert!(pr.lambda_at(t, x + dx) <= pr.lambda_at(t, x) || pr.lambda_at(t, x) == 0.0);
    }
}
