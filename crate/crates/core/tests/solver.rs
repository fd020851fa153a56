use proptest::prelude::*;
use sit_core::model::Densities;
use sit_core::solver::{simulate, simulate_scalar, Grid, SchemeConfig, Simulator, StateField, SterileModel};
use sit_core::wave::{front_position, track_front};
use sit_core::{ModelParams, ReleaseProfile, ScalarParams};

fn cfg(t_end: f64, every: f64) -> SchemeConfig {
    SchemeConfig { t_end, snapshot_every: every, ..Default::default() }
}

fn heat_kernel(x: f64, t: f64, d: f64) -> f64 {
    (-x * x / (4.0 * d * t)).exp() / (4.0 * std::f64::consts::PI * d * t).sqrt()
}

/// Max error against the heat kernel after diffusing from t=1 to t=5.
fn heat_error(dx: f64) -> f64 {
    let p = ModelParams::default();
    let grid = Grid::with_spacing(-20.0, 20.0, dx).unwrap();
    // Reaction off; the large cap keeps dt = 0.9 dx^2 / (2D) at every level.
    let c = SchemeConfig { reaction: false, cfl_reaction_cap: 1e6, ..cfg(4.0, 4.0) };
    let mut init = StateField::zeros(&grid);
    for (i, f) in init.f.iter_mut().enumerate() {
        *f = heat_kernel(grid.x(i), 1.0, p.d);
    }
    let sim = Simulator::new(grid.clone(), p, ReleaseProfile::off(), c, SterileModel::Dynamic, 1.0).unwrap();
    let traj = sim.simulate(&init).unwrap();
    let last = traj.final_state();
    (0..grid.len()).map(|i| (last.f[i] - heat_kernel(grid.x(i), 5.0, p.d)).abs()).fold(0.0, f64::max)
}

#[test]
fn heat_kernel_second_order() {
    let errs: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&dx| heat_error(dx)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "errors {errs:?}, order {order}");
    }
}

#[test]
fn equilibrium_unchanged() {
    let p = ModelParams::default();
    let eq = p.equilibrium().unwrap();
    let grid = Grid::with_spacing(-50.0, 50.0, 0.5).unwrap();
    let init = StateField::uniform(&grid, Densities { e: eq.e_star, f: eq.f_star, m: eq.m_star, ms: 0.0 });
    let traj = simulate(&init, &grid, &p, &ReleaseProfile::off(), &cfg(50.0, 10.0)).unwrap();
    for s in &traj.snapshots {
        for i in 0..grid.len() {
            assert!((s.e[i] / eq.e_star - 1.0).abs() < 1e-10);
            assert!((s.f[i] / eq.f_star - 1.0).abs() < 1e-10);
            assert!((s.m[i] / eq.m_star - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn extinction_persists_and_sterile_males_grow() {
    let p = ModelParams::default();
    let grid = Grid::with_spacing(-50.0, 50.0, 0.5).unwrap();
    let pr = ReleaseProfile::new(600.0, 0.2, -0.3).unwrap();
    let traj = simulate(&StateField::zeros(&grid), &grid, &p, &pr, &cfg(20.0, 5.0)).unwrap();
    let mut prev = 0.0;
    for s in &traj.snapshots {
        assert!(s.e.iter().chain(&s.f).chain(&s.m).all(|&v| v == 0.0));
        let mass = grid.integrate(&s.ms);
        assert!(mass >= prev);
        prev = mass;
    }
    assert!(prev > 0.0);
}

#[test]
fn invasion_front_advances_with_invariants() {
    let p = ModelParams::default();
    let eq = p.equilibrium().unwrap();
    let grid = Grid::with_spacing(-100.0, 300.0, 0.25).unwrap();
    let init = StateField::step_profile(&grid, &eq, 0.0);
    let traj = simulate(&init, &grid, &p, &ReleaseProfile::off(), &cfg(100.0, 5.0)).unwrap();
    assert!(traj.max_clip_ratio < 1e-8);
    assert!(traj.max_e_over_k <= 1.0 + 1e-8);
    let ft = track_front(&traj, 0.1 * eq.f_star);
    assert!(ft.positions.windows(2).skip(4).all(|w| w[1] > w[0]), "{:?}", ft.positions);
}

#[test]
fn blocked_front_stays_near_origin() {
    let p = ModelParams::default();
    let eq = p.equilibrium().unwrap();
    let grid = Grid::with_spacing(-100.0, 100.0, 0.25).unwrap();
    let init = StateField::step_profile(&grid, &eq, 0.0);
    let pr = ReleaseProfile::new(600.0, 0.2, 0.0).unwrap();
    let traj = simulate(&init, &grid, &p, &pr, &cfg(200.0, 10.0)).unwrap();
    let ft = track_front(&traj, 0.1 * eq.f_star);
    assert!(ft.positions.iter().all(|x| x.abs() < 10.0), "{:?}", ft.positions);
}

fn front_at_end(dx: f64) -> f64 {
    let p = ModelParams::default();
    let eq = p.equilibrium().unwrap();
    let grid = Grid::with_spacing(-100.0, 200.0, dx).unwrap();
    let init = StateField::step_profile(&grid, &eq, 0.0);
    let traj = simulate(&init, &grid, &p, &ReleaseProfile::off(), &cfg(100.0, 100.0)).unwrap();
    front_position(&grid, &traj.final_state().f, 0.1 * eq.f_star)
}

#[test]
fn grid_refinement_moves_front_less_than_two_cells() {
    let coarse = front_at_end(0.5);
    let fine = front_at_end(0.25);
    assert!((coarse - fine).abs() < 2.0 * 0.5, "{coarse} vs {fine}");
}

#[test]
fn scalar_zero_stays_zero() {
    let s = ScalarParams::default();
    let grid = Grid::with_spacing(-20.0, 20.0, 0.5).unwrap();
    let init = vec![0.0; grid.len()];
    let traj = simulate_scalar(&init, &grid, &s, &ReleaseProfile::off(), &cfg(10.0, 5.0)).unwrap();
    assert!(traj.u.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn scalar_front_moves_at_kpp_speed() {
    let s = ScalarParams::default();
    let u_star = s.equilibrium().unwrap();
    let grid = Grid::with_spacing(-50.0, 450.0, 0.25).unwrap();
    let init: Vec<f64> = grid.nodes().iter().map(|&x| if x < 0.0 { u_star } else { 0.0 }).collect();
    let traj = simulate_scalar(&init, &grid, &s, &ReleaseProfile::off(), &cfg(100.0, 5.0)).unwrap();
    let pos: Vec<f64> = traj.u.iter().map(|u| front_position(&grid, u, 0.1 * u_star)).collect();
    let (t, x): (Vec<f64>, Vec<f64>) =
        traj.times.iter().zip(&pos).filter(|(t, _)| **t >= 50.0).map(|(t, x)| (*t, *x)).unzip();
    let speed = sit_core::wave::least_squares_slope(&t, &x).unwrap();
    // 2 sqrt(beta/delta - mu) with the default parameters.
    let kpp = 2.0 * (s.beta / s.delta - s.mu).sqrt();
    assert!((speed / kpp - 1.0).abs() < 0.1, "measured {speed}, expected {kpp}");
    assert!(x.last().unwrap() < &(grid.x_max - 20.0));
}

#[test]
fn scalar_release_suppresses_invasion_ahead_of_sweep() {
    let s = ScalarParams::default();
    let u_star = s.equilibrium().unwrap();
    // Release built for speed -1; suppression is measured ahead of the slower frame x = -t/2.
    let sup = sit_core::construct::ScalarSuper::new(-1.0, 0.1, &s).unwrap();
    let pr = ReleaseProfile::new(sup.a_min, -sup.r_alpha, -1.0).unwrap();
    let grid = Grid::with_spacing(-200.0, 100.0, 0.25).unwrap();
    let init: Vec<f64> = grid.nodes().iter().map(|&x| if x < 0.0 { u_star } else { 0.0 }).collect();
    let traj = simulate_scalar(&init, &grid, &s, &pr, &cfg(100.0, 10.0)).unwrap();
    for (t, u) in traj.times.iter().zip(&traj.u) {
        let ahead = (0..grid.len()).filter(|&i| grid.x(i) > -0.5 * t).map(|i| u[i]).fold(0.0, f64::max);
        // Comparison with the moving super-solution: u <= u* e^{r (c - c') t} ahead of ct.
        let bound = u_star * (sup.r_alpha * 0.5 * t).exp();
        assert!(ahead <= bound * (1.0 + 1e-6) + 1e-9, "t={t}: {ahead} > {bound}");
    }
    let last = traj.u.last().unwrap();
    let ahead = (0..grid.len()).filter(|&i| grid.x(i) > -50.0).map(|i| last[i]).fold(0.0, f64::max);
    assert!(ahead < 1e-6 * u_star, "{ahead}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    #[test]
    fn ordered_data_stay_ordered(
        x_lo in -10.0f64..5.0,
        gap in 0.0f64..10.0,
        scale in 0.3f64..1.0,
        a_hi in 0.0f64..1000.0,
        a_frac in 0.0f64..1.0,
        c in -0.5f64..0.0,
    ) {
        let p = ModelParams::default();
        let eq = p.equilibrium().unwrap();
        let grid = Grid::with_spacing(-40.0, 40.0, 0.5).unwrap();
        // Run 1 starts below run 2 and receives more sterile males.
        let mut lo = StateField::step_profile(&grid, &eq, x_lo);
        for v in lo.e.iter_mut().chain(lo.f.iter_mut()).chain(lo.m.iter_mut()) {
            *v *= scale;
        }
        let hi = StateField::step_profile(&grid, &eq, x_lo + gap);
        let c_run = cfg(30.0, 2.0);
        let pr_lo = ReleaseProfile::new(a_hi, 0.2, c).unwrap();
        let pr_hi = ReleaseProfile::new(a_hi * a_frac, 0.2, c).unwrap();
        let t_lo = simulate(&lo, &grid, &p, &pr_lo, &c_run).unwrap();
        let t_hi = simulate(&hi, &grid, &p, &pr_hi, &c_run).unwrap();
        let rep = sit_core::construct::verify_ordering(&t_lo, &t_hi, 1e-6);
        prop_assert!(rep.pass, "{}", rep);
    }
}
